"""Target profiles: render kernel IR into source text for one language.

``python`` is the self-hosting profile (the generated module is executed
in-process). ``c99`` emits a translation unit that is compiled to a shared
library and loaded through ctypes.
"""

from __future__ import annotations

import math
import os

from ..errors import UnsupportedConstruct
from ..spec.model import IBin, ILit, ISym
from .ir import (
    Alloc,
    Assign,
    Call,
    Const,
    IndexVal,
    Invoke,
    IRFunction,
    KernelIR,
    Local,
    Op,
    Param,
    RegionLoad,
    Return,
    SeqLoad,
    SeqLoadDyn,
    Store,
    TableLoad,
    walk,
)

# poison codes shared by the runtime kernels and the loader
STATUS_OK = 0
STATUS_BOUND = 1
STATUS_NO_RULE = 2
STATUS_SEQ_RANGE = 3
STATUS_ALLOC = 4


def _literal(value: float) -> str:
    if not math.isfinite(value):
        raise UnsupportedConstruct(f"non-finite literal {value!r}")
    text = repr(float(value))
    return f"({text})" if text.startswith("-") else text


def _render_int(expr, names) -> str:
    if isinstance(expr, ILit):
        return f"({expr.value})" if expr.value < 0 else str(expr.value)
    if isinstance(expr, ISym):
        return names[expr.name]
    return f"({_render_int(expr.left, names)} {expr.op} {_render_int(expr.right, names)})"


def _cmp_text(constraint, names) -> str:
    return f"({_render_int(constraint.lhs, names)} {constraint.op} {_render_int(constraint.rhs, names)})"


class Profile:
    id = "abstract"
    extension = ""

    def render(self, ir: KernelIR) -> str:
        raise NotImplementedError

    # shared expression rendering; subclasses override the leaves that differ
    def expr(self, e, ctx) -> str:
        if isinstance(e, Const):
            return _literal(e.value)
        if isinstance(e, Param):
            return e.name
        if isinstance(e, Local):
            return e.name
        if isinstance(e, SeqLoad):
            return f"{e.name}[{e.index}]"
        if isinstance(e, RegionLoad):
            return f"rs_{e.region}[{e.index}]"
        if isinstance(e, Op):
            return f"({self.expr(e.left, ctx)} {e.op} {self.expr(e.right, ctx)})"
        if isinstance(e, Call):
            return f"{self.func(e.func)}({self.expr(e.arg, ctx)})"
        if isinstance(e, IndexVal):
            return self.index_value(_render_int(e.expr, ctx["names"]))
        if isinstance(e, SeqLoadDyn):
            return self.seq_dyn(e.name, _render_int(e.index, ctx["names"]))
        if isinstance(e, TableLoad):
            args = []
            for name, s in zip(ctx["spec_indices"], e.shifts):
                var = ctx["names"][name]
                args.append(var if s == 0 else f"{var} + {s}" if s > 0 else f"{var} - {-s}")
            return self.table_load(args)
        raise UnsupportedConstruct(f"cannot render {e!r}")

    def func(self, name: str) -> str:
        return name


# --------------------------------------------------------------------------
# python
# --------------------------------------------------------------------------

class PythonProfile(Profile):
    id = "python"
    extension = ".py"

    def func(self, name):
        return f"rs_math.{name}"

    def index_value(self, text):
        return f"float({text})"

    def seq_dyn(self, name, index):
        return f"rs_seq({name}, {index}, rs_flag)"

    def table_load(self, args):
        return f"rs_get({', '.join(args)}, rs_flag)"

    def render(self, ir: KernelIR) -> str:
        out = [
            f'"""Generated kernels for {ir.spec_name} ({ir.backend} backend)."""',
            "",
            "import math as rs_math",
            "",
            "",
            "def rs_always_inline(fn):",
            "    return fn",
            "",
        ]
        for fn in ir.functions:
            out.append("")
            if fn.kind == "runtime":
                out.extend(self._runtime(ir, fn))
            else:
                out.extend(self._straight(fn))
        return "\n".join(out) + "\n"

    def _straight(self, fn: IRFunction) -> list[str]:
        params = list(fn.params)
        if fn.kind == "layer":
            params.insert(0, "rs_out")
        lines = []
        if fn.inline_hint:
            lines.append("@rs_always_inline")
        lines.append(f"def {fn.name}({', '.join(params)}):")
        ctx = {}
        for st in fn.statements:
            if isinstance(st, Assign):
                lines.append(f"    {st.target} = {self.expr(st.expr, ctx)}")
            elif isinstance(st, Store):
                lines.append(f"    rs_{st.region}[{st.index}] = {self.expr(st.expr, ctx)}")
            elif isinstance(st, Alloc):
                lines.append(f"    rs_{st.region} = [0.0] * {st.length}")
            elif isinstance(st, Invoke):
                lines.append(f"    {st.function}({', '.join(['rs_' + st.region, *fn.params])})")
            elif isinstance(st, Return):
                lines.append(f"    return {self.expr(st.expr, ctx)}")
        if len(lines) == 1 + fn.inline_hint:
            lines.append("    pass")
        return lines

    def _runtime(self, ir: KernelIR, fn: IRFunction) -> list[str]:
        plan = fn.runtime
        idx = list(ir.indices)
        lim = {i: f"rs_lim_{i}" for i in idx}
        cell = {i: f"rs_c_{i}" for i in idx}
        arg = {i: f"rs_a_{i}" for i in idx}
        req = {i: i for i in idx}
        ctx = {"names": cell, "spec_indices": idx}
        valid_a = " and ".join(_cmp_text(c, arg) for c in plan.validity) or "True"
        inbox = " and ".join(f"0 <= {arg[i]} <= {lim[i]}" for i in idx)
        a_list = ", ".join(arg[i] for i in idx)
        params = [*idx, *(lim[i] for i in idx), *fn.params]
        L = [
            f"def {fn.name}({', '.join(params)}):",
            "    def rs_seq(s, k, rs_flag):",
            "        if 0 <= k < len(s):",
            "            return s[k]",
            "        if not rs_flag[0]:",
            f"            rs_flag[0] = {STATUS_SEQ_RANGE}",
            "        return 0.0",
            "",
            f"    def rs_valid({a_list}):",
            f"        return {valid_a}",
            "",
            f"    def rs_get({a_list}, rs_flag):",
            f"        if {inbox}:",
            f"            rs_k = {_flat(idx, arg, lim)}",
            "            if rs_st[rs_k] and not rs_flag[0]:",
            "                rs_flag[0] = rs_st[rs_k]",
            "            return rs_tab[rs_k]",
            f"        if rs_valid({a_list}) and not rs_flag[0]:",
            f"            rs_flag[0] = {STATUS_BOUND}",
            "        return 0.0",
            "",
            f"    if not rs_valid({', '.join(idx)}):",
            f"        return 0.0, {STATUS_OK}",
            "    if not (" + " and ".join(f"0 <= {i} <= {lim[i]}" for i in idx) + "):",
            f"        return 0.0, {STATUS_BOUND}",
            "    rs_size = " + " * ".join(f"({lim[i]} + 1)" for i in idx),
            "    rs_tab = [0.0] * rs_size",
            "    rs_st = [0] * rs_size",
        ]
        depth = 1
        for name, down, ext in zip(plan.indices, plan.descending, plan.extend):
            pad = "    " * depth
            if down:
                stop = "-1" if ext else f"{req[name]} - 1"
                L.append(f"{pad}for {cell[name]} in range({lim[name]}, {stop}, -1):")
            else:
                stop = f"{lim[name]} + 1" if ext else f"{req[name]} + 1"
                L.append(f"{pad}for {cell[name]} in range(0, {stop}):")
            depth += 1
        pad = "    " * depth
        L.append(f"{pad}rs_flag = [0]")
        L.append(f"{pad}if not rs_valid({', '.join(cell[i] for i in idx)}):")
        L.append(f"{pad}    rs_v = 0.0")
        for assignment, value in plan.bases:
            cond = " and ".join(f"{cell[i]} == {a}" for i, a in zip(idx, assignment))
            L.append(f"{pad}elif {cond}:")
            L.append(f"{pad}    rs_v = {self.expr(value, ctx)}")
        for guards, body in plan.rules:
            cond = " and ".join(_cmp_text(c, cell) for c in guards) or "True"
            L.append(f"{pad}elif {cond}:")
            L.append(f"{pad}    rs_v = {self.expr(body, ctx)}")
        L.append(f"{pad}else:")
        L.append(f"{pad}    rs_v = 0.0")
        L.append(f"{pad}    rs_flag[0] = {STATUS_NO_RULE}")
        L.append(f"{pad}rs_k = {_flat(idx, cell, lim)}")
        L.append(f"{pad}rs_tab[rs_k] = rs_v")
        L.append(f"{pad}rs_st[rs_k] = rs_flag[0]")
        L.append(f"    rs_k = {_flat(idx, req, lim)}")
        L.append("    return rs_tab[rs_k], rs_st[rs_k]")
        return L


def _flat(idx, names, lim) -> str:
    text = names[idx[0]]
    for i in idx[1:]:
        text = f"({text}) * ({lim[i]} + 1) + {names[i]}"
    return text


# --------------------------------------------------------------------------
# c99
# --------------------------------------------------------------------------

_C_PRELUDE = """\
#include <math.h>
#include <stdlib.h>

#if defined(_MSC_VER)
#define RECURSUM_FORCEINLINE static __forceinline
#elif defined(__GNUC__) || defined(__clang__)
#define RECURSUM_FORCEINLINE static inline __attribute__((always_inline))
#else
#define RECURSUM_FORCEINLINE static inline
#endif
"""


class C99Profile(Profile):
    id = "c99"
    extension = ".c"

    def index_value(self, text):
        return f"(double)({text})"

    def seq_dyn(self, name, index):
        return f"{self._prefix}_seq({name}, {name}_len, {index}, &rs_flag)"

    def table_load(self, args):
        return f"{self._prefix}_get(rs_tab, rs_st, {', '.join(self._lims)}, {', '.join(args)}, &rs_flag)"

    def _param_decls(self, ir: KernelIR, runtime: bool = False) -> list[str]:
        decls = [f"double {s}" for s in ir.scalars]
        for s in ir.sequences:
            decls.append(f"const double* {s}")
            if runtime:
                decls.append(f"int {s}_len")
        return decls

    def render(self, ir: KernelIR) -> str:
        out = [f"/* Generated kernels for {ir.spec_name} ({ir.backend} backend). */", _C_PRELUDE]
        for fn in ir.functions:
            if fn.kind == "runtime":
                out.extend(self._runtime(ir, fn))
            else:
                out.extend(self._straight(ir, fn))
            out.append("")
        return "\n".join(out)

    def _body(self, ir: KernelIR, fn: IRFunction) -> list[str]:
        used = _used_params(fn)
        lines = [f"    (void){p};" for p in fn.params if p not in used]
        for st in fn.statements:
            if isinstance(st, Assign):
                lines.append(f"    const double {st.target} = {self.expr(st.expr, {})};")
            elif isinstance(st, Store):
                lines.append(f"    rs_{st.region}[{st.index}] = {self.expr(st.expr, {})};")
            elif isinstance(st, Alloc):
                lines.append(f"    double rs_{st.region}[{st.length}];")
            elif isinstance(st, Invoke):
                lines.append(f"    {st.function}_impl({', '.join(['rs_' + st.region, *fn.params])});")
            elif isinstance(st, Return):
                lines.append(f"    return {self.expr(st.expr, {})};")
        return lines

    def _straight(self, ir: KernelIR, fn: IRFunction) -> list[str]:
        params = self._param_decls(ir)
        if fn.kind == "point":
            sig = f"double {fn.name}({', '.join(params) or 'void'})"
            return [sig, "{", *self._body(ir, fn), "}"]
        params.insert(0, "double* rs_out")
        decl = ", ".join(params)
        names = ", ".join(["rs_out", *fn.params])
        return [
            f"RECURSUM_FORCEINLINE void {fn.name}_impl({decl})",
            "{",
            *self._body(ir, fn),
            "}",
            "",
            f"void {fn.name}({decl})",
            "{",
            f"    {fn.name}_impl({names});",
            "}",
        ]

    def _runtime(self, ir: KernelIR, fn: IRFunction) -> list[str]:
        plan = fn.runtime
        idx = list(ir.indices)
        self._prefix = fn.name
        lim = {i: f"rs_lim_{i}" for i in idx}
        self._lims = [lim[i] for i in idx]
        cell = {i: f"rs_c_{i}" for i in idx}
        arg = {i: f"rs_a_{i}" for i in idx}
        req = {i: i for i in idx}
        ctx = {"names": cell, "spec_indices": idx}
        int_args = ", ".join(f"int {arg[i]}" for i in idx)
        lim_args = ", ".join(f"int {lim[i]}" for i in idx)
        valid = " && ".join(_cmp_text(c, arg) for c in plan.validity) or "1"
        inbox = " && ".join(f"{arg[i]} >= 0 && {arg[i]} <= {lim[i]}" for i in idx)
        L = [f"static int {fn.name}_valid({int_args})", "{"]
        L += [f"    (void){arg[i]};" for i in idx]
        L += [f"    return {valid};", "}", ""]
        nodes = [n for _, e in (*plan.bases, *plan.rules) for n in walk(e)]
        if any(isinstance(n, TableLoad) for n in nodes):
            L += [
                f"static double {fn.name}_get(const double* rs_tab, const int* rs_st, {lim_args}, {int_args}, int* rs_flag)",
                "{",
                f"    if ({inbox}) {{",
                f"        const long rs_k = {_flat_c(idx, arg, lim)};",
                "        if (rs_st[rs_k] && !*rs_flag) *rs_flag = rs_st[rs_k];",
                "        return rs_tab[rs_k];",
                "    }",
                f"    if ({fn.name}_valid({', '.join(arg[i] for i in idx)}) && !*rs_flag) *rs_flag = {STATUS_BOUND};",
                "    return 0.0;",
                "}",
                "",
            ]
        if any(isinstance(n, SeqLoadDyn) for n in nodes):
            L += [
                f"static double {fn.name}_seq(const double* rs_s, int rs_n, int rs_k, int* rs_flag)",
                "{",
                "    if (rs_k >= 0 && rs_k < rs_n) return rs_s[rs_k];",
                f"    if (!*rs_flag) *rs_flag = {STATUS_SEQ_RANGE};",
                "    return 0.0;",
                "}",
                "",
            ]
        params = [*(f"int {i}" for i in idx), *(f"int {lim[i]}" for i in idx)]
        params += self._param_decls(ir, runtime=True)
        params.append("int* rs_status")
        L += [f"double {fn.name}({', '.join(params)})", "{"]
        used = _used_params(fn)
        L += [f"    (void){p};" for p in fn.params if p not in used]
        L += [f"    (void){s}_len;" for s in ir.sequences if s not in used]
        L += [
            f"    if (!{fn.name}_valid({', '.join(idx)})) {{",
            f"        *rs_status = {STATUS_OK};",
            "        return 0.0;",
            "    }",
            "    if (!(" + " && ".join(f"{i} >= 0 && {i} <= {lim[i]}" for i in idx) + ")) {",
            f"        *rs_status = {STATUS_BOUND};",
            "        return 0.0;",
            "    }",
            "    const long rs_size = " + " * ".join(f"((long){lim[i]} + 1)" for i in idx) + ";",
            "    double* rs_tab = (double*)malloc(sizeof(double) * (size_t)rs_size);",
            "    int* rs_st = (int*)malloc(sizeof(int) * (size_t)rs_size);",
            "    if (!rs_tab || !rs_st) {",
            "        free(rs_tab);",
            "        free(rs_st);",
            f"        *rs_status = {STATUS_ALLOC};",
            "        return 0.0;",
            "    }",
        ]
        depth = 1
        for name, down, ext in zip(plan.indices, plan.descending, plan.extend):
            pad = "    " * depth
            c = cell[name]
            if down:
                stop = "0" if ext else req[name]
                L.append(f"{pad}for (int {c} = {lim[name]}; {c} >= {stop}; --{c}) {{")
            else:
                stop = lim[name] if ext else req[name]
                L.append(f"{pad}for (int {c} = 0; {c} <= {stop}; ++{c}) {{")
            depth += 1
        pad = "    " * depth
        L.append(f"{pad}int rs_flag = 0;")
        L.append(f"{pad}double rs_v;")
        L.append(f"{pad}if (!{fn.name}_valid({', '.join(cell[i] for i in idx)})) {{")
        L.append(f"{pad}    rs_v = 0.0;")
        for assignment, value in plan.bases:
            cond = " && ".join(f"{cell[i]} == {a}" for i, a in zip(idx, assignment))
            L.append(f"{pad}}} else if ({cond}) {{")
            L.append(f"{pad}    rs_v = {self.expr(value, ctx)};")
        for guards, body in plan.rules:
            cond = " && ".join(_cmp_text(c, cell) for c in guards) or "1"
            L.append(f"{pad}}} else if ({cond}) {{")
            L.append(f"{pad}    rs_v = {self.expr(body, ctx)};")
        L.append(f"{pad}}} else {{")
        L.append(f"{pad}    rs_v = 0.0;")
        L.append(f"{pad}    rs_flag = {STATUS_NO_RULE};")
        L.append(f"{pad}}}")
        L.append(f"{pad}rs_tab[{_flat_c(idx, cell, lim)}] = rs_v;")
        L.append(f"{pad}rs_st[{_flat_c(idx, cell, lim)}] = rs_flag;")
        for d in range(depth - 1, 0, -1):
            L.append("    " * d + "}")
        L += [
            f"    const long rs_k = {_flat_c(idx, req, lim)};",
            "    const double rs_result = rs_tab[rs_k];",
            "    *rs_status = rs_st[rs_k];",
            "    free(rs_tab);",
            "    free(rs_st);",
            "    return rs_result;",
            "}",
        ]
        return L


def _flat_c(idx, names, lim) -> str:
    text = f"(long){names[idx[0]]}"
    for i in idx[1:]:
        text = f"({text}) * ((long){lim[i]} + 1) + {names[i]}"
    return text


def _used_params(fn: IRFunction) -> set[str]:
    from .ir import walk

    used = set()
    exprs = []
    for st in fn.statements:
        if isinstance(st, (Assign, Store, Return)):
            exprs.append(st.expr)
        elif isinstance(st, Invoke):
            used.update(fn.params)
    if fn.runtime is not None:
        exprs += [v for _, v in fn.runtime.bases] + [b for _, b in fn.runtime.rules]
    for e in exprs:
        for node in walk(e):
            if isinstance(node, (Param,)):
                used.add(node.name)
            elif isinstance(node, (SeqLoad, SeqLoadDyn)):
                used.add(node.name)
    return used


PROFILES = {"python": PythonProfile, "c99": C99Profile}


def default_profile_id() -> str:
    return os.environ.get("RECURSUM_PROFILE", "python")


def get_profile(profile_id: str | None = None) -> Profile:
    pid = profile_id or default_profile_id()
    try:
        return PROFILES[pid]()
    except KeyError:
        raise UnsupportedConstruct(
            f"unknown profile {pid!r}; choose one of {sorted(PROFILES)}"
        ) from None
