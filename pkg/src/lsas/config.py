"""Experiment configuration files.

The format is INI-style: ``[section]`` headers followed by ``key = value``
lines; ``#`` and ``;`` start comments. Keys are case sensitive. Sections:

``[experiment]`` (required)
    ``kind`` (required), ``output`` (default ``results.csv``),
    ``rho_db`` (downlink transmit SNR for the reciprocity kinds, default 10).
``[scenario]``
    Any :class:`~lsas.scenario.Scenario` field; omitted fields keep their defaults.
``[mismatch]``
    ``theta_{bs,ue}_{t,r}`` in radians (``pi/3`` style values are accepted),
    ``delta2_{bs,ue}_{t,r}`` in natural-log units or ``delta2_..._db`` in dB^2.
``[sweep]``
    ``parameter`` and a comma-separated ``values`` list.

See ``configs/`` for one commented example per experiment kind.
"""

import configparser
import math
import re
from dataclasses import dataclass, field, fields, replace

from .exceptions import ConfigError
from .reciprocity import DB2_TO_NAT, MismatchConfig
from .scenario import Scenario

KINDS = (
    "uplink-ergodic",
    "uplink-asymptotic-compare",
    "distributed-vs-collocated",
    "mismatch-phase-sweep",
    "mismatch-amplitude-sweep",
    "calibration-check",
)

UPLINK_KINDS = KINDS[:3]
MISMATCH_KINDS = KINDS[3:5]

_INT_FIELDS = {"L", "N", "M", "K", "rng_seed", "num_trials"}
_SCENARIO_SWEEPABLE = tuple(n for n in Scenario.field_names()
                            if n not in ("rng_seed", "num_trials"))
_CHAINS = ("bs_t", "bs_r", "ue_t", "ue_r")
_PHASE_SWEEPABLE = ("theta_bs", "theta_ue") + tuple(f"theta_{c}" for c in _CHAINS) + ("rho_db",)
_AMP_SWEEPABLE = (("delta2_bs", "delta2_ue", "delta2_bs_db", "delta2_ue_db")
                  + tuple(f"delta2_{c}" for c in _CHAINS)
                  + tuple(f"delta2_{c}_db" for c in _CHAINS) + ("rho_db",))

SWEEPABLE = {
    "uplink-ergodic": _SCENARIO_SWEEPABLE,
    "uplink-asymptotic-compare": _SCENARIO_SWEEPABLE,
    "distributed-vs-collocated": _SCENARIO_SWEEPABLE,
    "mismatch-phase-sweep": _PHASE_SWEEPABLE,
    "mismatch-amplitude-sweep": _AMP_SWEEPABLE,
    "calibration-check": (),
}

_EXPERIMENT_KEYS = ("kind", "output", "rho_db")
_MISMATCH_KEYS = (tuple(f"theta_{c}" for c in _CHAINS) + tuple(f"delta2_{c}" for c in _CHAINS)
                  + tuple(f"delta2_{c}_db" for c in _CHAINS))
_SECTIONS = ("experiment", "scenario", "mismatch", "sweep")

_PI_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*"
                    r"(?:/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?))?\s*$")


@dataclass(frozen=True)
class ExperimentSpec:
    """A validated experiment description."""

    kind: str
    scenario: Scenario = field(default_factory=Scenario)
    mismatch: MismatchConfig = None
    sweep_parameter: str = None
    sweep_values: tuple = ()
    output_path: str = "results.csv"
    rho_db: float = 10.0

    def points(self):
        """Sweep values, or a single ``None`` when there is no sweep."""
        return list(self.sweep_values) if self.sweep_parameter else [None]


def parse_number(text):
    """Parse a float, also accepting ``pi``, ``pi/3``, ``2*pi/3`` and ``0.5 pi``."""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_RE.match(text)
    if not m:
        raise ValueError(f"not a number: {text!r}")
    coef = float(m.group(1)) if m.group(1) else 1.0
    den = float(m.group(2)) if m.group(2) else 1.0
    return coef * math.pi / den


def _line_index(text):
    """Map (section, key) -> 1-based line number, plus section header lines."""
    index = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            index[(section, None)] = no
        elif section is not None:
            key = re.split(r"[=:]", line, maxsplit=1)[0].strip()
            index.setdefault((section, key), no)
    return index


def _coerce_scenario_value(name, value, line):
    try:
        x = parse_number(value) if isinstance(value, str) else float(value)
    except ValueError as exc:
        raise ConfigError(str(exc), key=name, line=line) from None
    if name in _INT_FIELDS:
        if x != int(x):
            raise ConfigError(f"must be an integer, got {value!r}", key=name, line=line)
        return int(x)
    return x


def _scenario_from(values, lines):
    kwargs = {}
    for key, value in values.items():
        kwargs[key] = _coerce_scenario_value(key, value, lines.get(key))
    try:
        return Scenario(**kwargs)
    except ValueError as exc:
        key = str(exc).split(" ", 1)[0]
        raise ConfigError(str(exc), key=key, line=lines.get(key)) from None


def _mismatch_from(values, lines):
    kwargs = {}
    for key, value in values.items():
        try:
            x = parse_number(value)
        except ValueError as exc:
            raise ConfigError(str(exc), key=key, line=lines.get(key)) from None
        if key.endswith("_db"):
            base = key[:-3]
            if base in values:
                raise ConfigError(f"both {base} and {key} given", key=key, line=lines.get(key))
            if x < 0:
                raise ConfigError("must be >= 0", key=key, line=lines.get(key))
            kwargs[base] = x * DB2_TO_NAT
        else:
            kwargs[key] = x
    try:
        return MismatchConfig(**kwargs)
    except ValueError as exc:
        key = str(exc).split(" ", 1)[0]
        raise ConfigError(str(exc), key=key, line=lines.get(key)) from None


def apply_sweep_value(spec, value):
    """Scenario, mismatch config and ``rho_db`` for one sweep point."""
    scenario, mismatch, rho_db = spec.scenario, spec.mismatch, spec.rho_db
    name = spec.sweep_parameter
    if value is None or name is None:
        return scenario, mismatch, rho_db
    if name == "rho_db":
        return scenario, mismatch, float(value)
    if name in Scenario.field_names():
        v = int(value) if name in _INT_FIELDS else float(value)
        return scenario.replace(**{name: v}), mismatch, rho_db
    mismatch = mismatch or MismatchConfig()
    nat = float(value)
    if name.endswith("_db"):
        name, nat = name[:-3], nat * DB2_TO_NAT
    if name in ("theta_bs", "theta_ue", "delta2_bs", "delta2_ue"):
        targets = (name + "_t", name + "_r")
    else:
        targets = (name,)
    kw = {t: nat for t in targets}
    return scenario, MismatchConfig(**{**_mismatch_dict(mismatch), **kw}), rho_db


def _mismatch_dict(cfg):
    return {f.name: getattr(cfg, f.name) for f in fields(cfg)}


def _validate_sweep_point(spec, value, line):
    try:
        apply_sweep_value(spec, value)
    except ValueError as exc:
        raise ConfigError(f"sweep value {value!r} invalid: {exc}",
                          key=spec.sweep_parameter, line=line) from None


def parse_config(text):
    """Parse and validate configuration text into an ``ExperimentSpec``.

    Raises
    ------
    ConfigError
        On syntax errors, unknown or missing keys and invalid values; the
        message names the key and its line.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                       default_section="__defaults__")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError("duplicate key", key=exc.option, line=exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError("duplicate section", key=exc.section, line=exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any [section]", line=exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigError("cannot parse line", line=line) from None

    lines = _line_index(text)
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError("unknown section", key=section, line=lines.get((section, None)))
    allowed = {"experiment": _EXPERIMENT_KEYS, "scenario": tuple(Scenario.field_names()),
               "mismatch": _MISMATCH_KEYS, "sweep": ("parameter", "values")}
    for section in parser.sections():
        for key in parser[section]:
            if key not in allowed[section]:
                raise ConfigError(f"unknown key in [{section}]", key=key,
                                  line=lines.get((section, key)))

    if "experiment" not in parser or "kind" not in parser["experiment"]:
        raise ConfigError("missing required key [experiment] kind", key="kind")
    exp = parser["experiment"]
    kind = exp["kind"].strip()
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}",
                          key="kind", line=lines.get(("experiment", "kind")))

    def sec_lines(section):
        return {k: lines.get((section, k)) for (s, k) in lines if s == section and k}

    scenario = _scenario_from(dict(parser["scenario"]) if "scenario" in parser else {},
                              sec_lines("scenario"))
    mismatch = None
    if "mismatch" in parser:
        mismatch = _mismatch_from(dict(parser["mismatch"]), sec_lines("mismatch"))
        if kind in UPLINK_KINDS:
            raise ConfigError(f"[mismatch] is not used by kind {kind!r}", key="mismatch",
                              line=lines.get(("mismatch", None)))

    rho_db = 10.0
    if "rho_db" in exp:
        try:
            rho_db = parse_number(exp["rho_db"])
        except ValueError as exc:
            raise ConfigError(str(exc), key="rho_db",
                              line=lines.get(("experiment", "rho_db"))) from None
        if not math.isfinite(rho_db):
            raise ConfigError("must be finite", key="rho_db",
                              line=lines.get(("experiment", "rho_db")))
    output = exp.get("output", "results.csv").strip()
    if not output:
        raise ConfigError("must not be empty", key="output",
                          line=lines.get(("experiment", "output")))

    sweep_parameter, sweep_values = None, ()
    if "sweep" in parser:
        sw = parser["sweep"]
        if kind == "calibration-check":
            raise ConfigError("calibration-check takes no sweep", key="sweep",
                              line=lines.get(("sweep", None)))
        for req in ("parameter", "values"):
            if req not in sw:
                raise ConfigError("missing required key in [sweep]", key=req,
                                  line=lines.get(("sweep", None)))
        sweep_parameter = sw["parameter"].strip()
        if sweep_parameter not in SWEEPABLE[kind]:
            raise ConfigError(f"cannot sweep {sweep_parameter!r} for kind {kind!r}; "
                              f"choose from {', '.join(SWEEPABLE[kind])}", key="parameter",
                              line=lines.get(("sweep", "parameter")))
        vline = lines.get(("sweep", "values"))
        try:
            sweep_values = tuple(parse_number(v) for v in sw["values"].split(",") if v.strip())
        except ValueError as exc:
            raise ConfigError(str(exc), key="values", line=vline) from None
        if not sweep_values:
            raise ConfigError("empty value list", key="values", line=vline)

    spec = ExperimentSpec(kind=kind, scenario=scenario, mismatch=mismatch,
                          sweep_parameter=sweep_parameter, sweep_values=sweep_values,
                          output_path=output, rho_db=rho_db)
    if kind in MISMATCH_KINDS or kind == "calibration-check":
        if spec.mismatch is None:
            spec = replace(spec, mismatch=MismatchConfig())
    for v in spec.sweep_values:
        _validate_sweep_point(spec, v, lines.get(("sweep", "values")))
    return spec


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(spec):
    """Render ``spec`` as configuration text that parses back to an equal spec."""
    out = ["[experiment]", f"kind = {spec.kind}", f"output = {spec.output_path}",
           f"rho_db = {spec.rho_db!r}", "", "[scenario]"]
    for f in fields(spec.scenario):
        out.append(f"{f.name} = {getattr(spec.scenario, f.name)!r}")
    if spec.mismatch is not None:
        out += ["", "[mismatch]"]
        for f in fields(spec.mismatch):
            out.append(f"{f.name} = {getattr(spec.mismatch, f.name)!r}")
    if spec.sweep_parameter is not None:
        out += ["", "[sweep]", f"parameter = {spec.sweep_parameter}",
                "values = " + ", ".join(repr(float(v)) for v in spec.sweep_values)]
    return "\n".join(out) + "\n"
