"""Load a rendered artifact into callable kernels.

The Python profile is executed in a fresh namespace. The C profile is
compiled with the system C compiler into a shared library (cached by source
hash) and bound through ctypes.
"""

from __future__ import annotations

import ctypes
import hashlib
import os
import shutil
import subprocess
import tempfile
from pathlib import Path

from ..errors import (
    CompileFailure,
    EvaluationError,
    NoApplicableRule,
    SequenceOutOfRange,
    TableBoundExceeded,
    UnsupportedConstruct,
)
from ..interp import EvalEnv
from .artifact import SourceArtifact
from .profiles import STATUS_ALLOC, STATUS_BOUND, STATUS_NO_RULE, STATUS_OK, STATUS_SEQ_RANGE

CFLAGS = ["-std=c99", "-O2", "-Wall", "-Wextra", "-Werror", "-shared", "-fPIC"]


def find_compiler() -> str | None:
    for cc in (os.environ.get("CC"), "cc", "gcc", "clang"):
        if cc and shutil.which(cc):
            return cc
    return None


def cache_dir() -> Path:
    root = os.environ.get("RECURSUM_CACHE") or os.path.join(tempfile.gettempdir(), "recursum-cache")
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


def compile_c(source: str, name: str = "kernels") -> Path:
    """Compile a C translation unit into a shared library, reusing a cached build."""
    cc = find_compiler()
    if cc is None:
        raise CompileFailure("no C compiler found (set CC)")
    digest = hashlib.sha256((" ".join(CFLAGS) + "\n" + source).encode()).hexdigest()[:20]
    lib = cache_dir() / f"{name}-{digest}.so"
    if lib.exists():
        return lib
    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / f"{name}.c"
        src.write_text(source, encoding="utf-8")
        out = Path(tmp) / "lib.so"
        proc = subprocess.run(
            [cc, *CFLAGS, str(src), "-o", str(out), "-lm"],
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            raise CompileFailure(f"{cc} failed:\n{proc.stderr.strip()}")
        os.replace(out, lib)
    return lib


def _raise_status(status: int, where: str) -> None:
    if status == STATUS_OK:
        return
    if status == STATUS_BOUND:
        raise TableBoundExceeded(f"{where}: needs entries beyond the table bound")
    if status == STATUS_NO_RULE:
        raise NoApplicableRule(f"{where}: no rule applies to a required entry")
    if status == STATUS_SEQ_RANGE:
        raise SequenceOutOfRange(f"{where}: sequence read out of range")
    if status == STATUS_ALLOC:
        raise MemoryError(f"{where}: table allocation failed")
    raise EvaluationError(f"{where}: runtime kernel status {status}")


class Kernels:
    """Callable view of one artifact, independent of the profile it was rendered with."""

    def __init__(self, artifact: SourceArtifact):
        self.artifact = artifact
        self.manifest = artifact.manifest
        self.scalars = tuple(self.manifest["scalars"])
        self.sequences = tuple(self.manifest["sequences"])
        self._fns = {f["name"]: f for f in self.manifest["functions"]}
        self._by_key = {tuple(f["key"]): f for f in self.manifest["functions"]}
        self._seq_needs = {name: self._closure_needs(name) for name in self._fns}

    def _closure_needs(self, name: str) -> dict:
        needs: dict = {}
        stack, seen = [name], set()
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            f = self._fns[n]
            for s, k in f["seq_lengths"].items():
                needs[s] = max(needs.get(s, 0), k)
            stack.extend(f["calls"])
        return needs

    @property
    def keys(self):
        return list(self._by_key)

    def function_name(self, key) -> str:
        return self._by_key[tuple(key)]["name"]

    def _check_seqs(self, name: str, env: EvalEnv) -> None:
        for s, need in self._seq_needs[name].items():
            have = len(env.sequences[s])
            if have < need:
                raise SequenceOutOfRange(f"{name}: sequence {s!r} needs length {need}, got {have}")

    # public entry points -------------------------------------------------

    def point(self, key, env: EvalEnv) -> float:
        return self.bind(key, env)()

    def layer(self, key, env: EvalEnv) -> list[float]:
        return list(self.bind(key, env)())

    def runtime(self, point, env: EvalEnv, limits) -> float:
        return self.bind_runtime(point, env, limits)()

    def bind(self, key, env: EvalEnv):
        """Zero-argument callable running the kernel for ``key`` (used by the benchmark)."""
        raise NotImplementedError

    def bind_runtime(self, point, env: EvalEnv, limits):
        raise NotImplementedError


class PythonKernels(Kernels):
    def __init__(self, artifact: SourceArtifact):
        super().__init__(artifact)
        self.namespace: dict = {"__name__": f"recursum_generated_{self.manifest['spec']}"}
        code = compile(artifact.source, artifact.source_path, "exec")
        exec(code, self.namespace)

    def _args(self, env: EvalEnv):
        return [float(env.scalars[s]) for s in self.scalars] + [
            [float(v) for v in env.sequences[s]] for s in self.sequences
        ]

    def bind(self, key, env: EvalEnv):
        meta = self._by_key[tuple(key)]
        self._check_seqs(meta["name"], env)
        fn = self.namespace[meta["name"]]
        args = self._args(env)
        if meta["kind"] == "point":
            return lambda: fn(*args)
        length = meta["output_length"]

        def run():
            out = [0.0] * length
            fn(out, *args)
            return out

        return run

    def bind_runtime(self, point, env: EvalEnv, limits):
        (meta,) = self.manifest["functions"]
        fn = self.namespace[meta["name"]]
        args = [*map(int, point), *map(int, limits), *self._args(env)]

        def run():
            value, status = fn(*args)
            _raise_status(status, meta["name"])
            return value

        return run


class CKernels(Kernels):
    def __init__(self, artifact: SourceArtifact):
        super().__init__(artifact)
        self.library_path = compile_c(artifact.source, self.manifest["spec"])
        self.lib = ctypes.CDLL(str(self.library_path))
        self._bound = {}
        dbl, dptr = ctypes.c_double, ctypes.POINTER(ctypes.c_double)
        for meta in self.manifest["functions"]:
            cfn = getattr(self.lib, meta["name"])
            value_args = [dbl] * len(self.scalars)
            if meta["kind"] == "runtime":
                arity = len(self.manifest["indices"])
                seq_args = [t for _ in self.sequences for t in (dptr, ctypes.c_int)]
                cfn.argtypes = [ctypes.c_int] * (2 * arity) + value_args + seq_args + [
                    ctypes.POINTER(ctypes.c_int)
                ]
                cfn.restype = dbl
            elif meta["kind"] == "layer":
                cfn.argtypes = [dptr] + value_args + [dptr] * len(self.sequences)
                cfn.restype = None
            else:
                cfn.argtypes = value_args + [dptr] * len(self.sequences)
                cfn.restype = dbl
            self._bound[meta["name"]] = cfn

    def _seq_arrays(self, env: EvalEnv):
        arrays = []
        for s in self.sequences:
            values = [float(v) for v in env.sequences[s]]
            arrays.append((ctypes.c_double * max(1, len(values)))(*values))
        return arrays

    def bind(self, key, env: EvalEnv):
        meta = self._by_key[tuple(key)]
        self._check_seqs(meta["name"], env)
        cfn = self._bound[meta["name"]]
        args = [float(env.scalars[s]) for s in self.scalars] + self._seq_arrays(env)
        if meta["kind"] == "point":
            return lambda: cfn(*args)
        length = meta["output_length"]

        def run():
            out = (ctypes.c_double * length)()
            cfn(out, *args)
            return out

        return run

    def bind_runtime(self, point, env: EvalEnv, limits):
        (meta,) = self.manifest["functions"]
        cfn = self._bound[meta["name"]]
        arrays = self._seq_arrays(env)
        seq_args = []
        for s, arr in zip(self.sequences, arrays):
            seq_args += [arr, len(env.sequences[s])]
        status = ctypes.c_int(0)
        args = [*map(int, point), *map(int, limits)]
        args += [float(env.scalars[s]) for s in self.scalars] + seq_args + [ctypes.byref(status)]

        def run():
            value = cfn(*args)
            _raise_status(status.value, meta["name"])
            return value

        return run


_LOADERS = {"python": PythonKernels, "c99": CKernels}


def load(artifact: SourceArtifact) -> Kernels:
    try:
        return _LOADERS[artifact.profile_id](artifact)
    except KeyError:
        raise UnsupportedConstruct(f"no loader for profile {artifact.profile_id!r}") from None
