"""Run configuration in a flat ``section.key = value`` text format.

Lines starting with ``#`` are comments.  Values are booleans (``true`` /
``false``), integers, floats, comma-separated float lists or bare strings.
Every recognised key is listed in ``KEYS``; unknown keys are an error.
"""

from dataclasses import dataclass, fields, replace

from .errors import ConfigError
from .verifier import TARGET_CLASSES

# dotted key -> RunConfig attribute
KEYS = {
    "model.n": "n",
    "model.k": "k",
    "grid.N": "N",
    "initial.kind": "initial_kind",
    "initial.rho0": "rho0",
    "initial.coeffs": "coeffs",
    "sampler.amp_max": "amp_max",
    "sampler.M": "M",
    "sampler.target_class": "target_class",
    "sampler.seed": "seed",
    "sampler.max_attempts": "max_attempts",
    "stop.tol_speed": "tol_speed",
    "stop.tol_osc": "tol_osc",
    "stop.t_max": "t_max",
    "stop.max_steps": "max_steps",
    "monitor.every": "record_every",
    "monitor.interval": "record_interval",
    "monitor.tol": "monitor_tol",
    "monitor.abort": "monitor_abort",
    "flow.safety": "safety",
    "audit.tol": "audit_tol",
    "hk.count": "hk_count",
    "hk.tol": "hk_tol",
    "output.dir": "out_dir",
    "output.csv": "emit_csv",
    "output.json": "emit_json",
    "output.svg": "emit_svg",
}

INITIAL_KINDS = ("slice", "cosine", "sampler")


@dataclass(frozen=True)
class RunConfig:
    n: int = 2
    k: int = 2
    N: int = 256
    initial_kind: str = "cosine"
    rho0: float = 1.0
    coeffs: tuple = (0.0, 0.05)
    amp_max: float = 0.03
    M: int = 3
    target_class: str = "pinched-admissible"
    seed: int = 0
    max_attempts: int = 10000
    tol_speed: float = 1e-6
    tol_osc: float = 1e-6
    t_max: float = 1000.0
    max_steps: int = 1000000
    record_every: int = 1000
    record_interval: float = 0.0
    monitor_tol: float = 1e-8
    monitor_abort: bool = False
    safety: float = 0.2
    audit_tol: float = 1e-8
    hk_count: int = 100
    hk_tol: float = 1e-8
    out_dir: str = "out"
    emit_csv: bool = True
    emit_json: bool = True
    emit_svg: bool = False

    def validate(self):
        """Raise ``ConfigError`` unless every invariant holds; return ``self``."""
        if self.n < 2:
            raise ConfigError(f"model.n must be >= 2, got {self.n}")
        if not (2 <= self.k <= self.n):
            raise ConfigError(f"model.k must satisfy 2 <= k <= n, got k={self.k}, n={self.n}")
        if self.N < 4 or self.N % 2:
            raise ConfigError(f"grid.N must be even and >= 4, got {self.N}")
        if self.initial_kind not in INITIAL_KINDS:
            raise ConfigError(f"initial.kind must be one of {INITIAL_KINDS}")
        if self.target_class not in TARGET_CLASSES:
            raise ConfigError(f"sampler.target_class must be one of {TARGET_CLASSES}")
        if not self.rho0 > 0:
            raise ConfigError("initial.rho0 must be positive")
        if self.amp_max < 0 or self.M < 1:
            raise ConfigError("sampler.amp_max must be >= 0 and sampler.M >= 1")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("sampler.seed must be an unsigned 64-bit integer")
        for name in ("tol_speed", "tol_osc", "t_max", "monitor_tol", "safety", "audit_tol",
                     "hk_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_steps < 1 or self.record_every < 1 or self.max_attempts < 1:
            raise ConfigError("stop.max_steps, monitor.every and sampler.max_attempts must be >= 1")
        if self.record_interval < 0 or self.hk_count < 0:
            raise ConfigError("monitor.interval and hk.count must be >= 0")
        return self

    def to_text(self):
        out = []
        for key, attr in KEYS.items():
            out.append(f"{key} = {_format(getattr(self, attr))}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text, source="<string>"):
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in KEYS:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            attr = KEYS[key]
            try:
                values[attr] = _parse(value, types[attr])
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
        return cls(**values)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), source=str(path))

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    return str(value)


def _parse(value, typ):
    if typ in (bool, "bool"):
        low = value.lower()
        if low not in ("true", "false"):
            raise ValueError(f"expected true or false, got {value!r}")
        return low == "true"
    if typ in (int, "int"):
        return int(value)
    if typ in (float, "float"):
        return float(value)
    if typ in (tuple, "tuple"):
        return tuple(float(v) for v in value.split(",") if v.strip())
    return value
