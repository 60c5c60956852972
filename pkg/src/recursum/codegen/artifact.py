"""Source artifacts: rendered kernel text plus a JSON manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..spec.model import RecurrenceSpec
from .ir import Bounds, KernelIR
from .lower import DEFAULT_MAX_INSTANCES, lower
from .opcount import function_ops
from .profiles import Profile, get_profile

MANIFEST = "manifest.json"


@dataclass(frozen=True)
class SourceArtifact:
    files: dict
    profile_id: str
    manifest: dict
    ir: KernelIR | None = field(default=None, compare=False, repr=False)

    @classmethod
    def read(cls, directory) -> "SourceArtifact":
        """Reload an artifact written by ``write`` (the IR is not restored)."""
        directory = Path(directory)
        manifest = json.loads((directory / MANIFEST).read_text(encoding="utf-8"))
        source = manifest["source"]
        files = {
            MANIFEST: (directory / MANIFEST).read_text(encoding="utf-8"),
            source: (directory / source).read_text(encoding="utf-8"),
        }
        return cls(files, manifest["profile"], manifest)

    @property
    def source_path(self) -> str:
        return self.manifest["source"]

    @property
    def source(self) -> str:
        return self.files[self.source_path]

    def write(self, directory) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for rel, text in sorted(self.files.items()):
            path = directory / rel
            path.write_text(text, encoding="utf-8")
            written.append(path)
        return written


def manifest_for(ir: KernelIR, profile: Profile, source: str) -> dict:
    functions = []
    for fn in ir.functions:
        functions.append(
            {
                "name": fn.name,
                "kind": fn.kind,
                "key": list(fn.key),
                "output_length": fn.output_length,
                "inline_hint": fn.inline_hint,
                "calls": list(fn.calls),
                "seq_lengths": dict(fn.seq_lengths),
                "ops": function_ops(fn).to_json(),
            }
        )
    return {
        "spec": ir.spec_name,
        "backend": ir.backend,
        "profile": profile.id,
        "source": source,
        "bounds": ir.bounds.to_json() if ir.bounds is not None else None,
        "indices": list(ir.indices),
        "scalars": list(ir.scalars),
        "sequences": list(ir.sequences),
        "descent": list(ir.descent),
        "output_axis": ir.output_axis,
        "functions": functions,
    }


def render(ir: KernelIR, profile: Profile | str | None = None) -> SourceArtifact:
    prof = profile if isinstance(profile, Profile) else get_profile(profile)
    source = f"{ir.spec_name}_{ir.backend}{prof.extension}"
    manifest = manifest_for(ir, prof, source)
    files = {
        source: prof.render(ir),
        MANIFEST: json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    }
    return SourceArtifact(files, prof.id, manifest, ir)


def generate(
    spec: RecurrenceSpec,
    backend: str,
    bounds: Bounds | None = None,
    profile: Profile | str | None = None,
    max_instances: int = DEFAULT_MAX_INSTANCES,
) -> SourceArtifact:
    return render(lower(spec, backend, bounds, max_instances), profile)


def emit_unrolled(spec, bounds, profile=None, max_instances=DEFAULT_MAX_INSTANCES) -> SourceArtifact:
    return generate(spec, "unrolled", bounds, profile, max_instances)


def emit_layered(spec, bounds, profile=None, max_instances=DEFAULT_MAX_INSTANCES) -> SourceArtifact:
    return generate(spec, "layered", bounds, profile, max_instances)


def emit_runtime(spec, profile=None) -> SourceArtifact:
    return generate(spec, "runtime", None, profile)
