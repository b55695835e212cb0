"""Run configuration files: one `key = value` per line, `#` comments.

Keys match the parameter names; values are plain numbers except probes, which
is a comma separated list of grid locations (may be empty). Parsing errors
carry the 1-based line number; a syntactically valid file whose values break a
model invariant raises the validation error with every violation listed.
"""

from dataclasses import fields

from .core import SimParams, validate_params
from .errors import ConfigParseError, ConfigValidationError

_INT_KEYS = {"grid_points", "irk_stages", "stage_max_iter"}
_STR_KEYS = {"laplacian_sign", "dealias"}
_FLOAT_KEYS = {
    f.name
    for f in fields(SimParams)
    if f.name not in _INT_KEYS | _STR_KEYS | {"probes"}
}
_ALL_KEYS = _INT_KEYS | _STR_KEYS | _FLOAT_KEYS | {"probes"}


def _convert(key, raw, lineno):
    if key == "probes":
        raw = raw.strip()
        if not raw:
            return ()
        parts = [p.strip() for p in raw.split(",")]
        try:
            return tuple(float(p) for p in parts)
        except ValueError:
            raise ConfigParseError(
                f"probes must be comma separated numbers, got {raw!r}", line=lineno, key=key
            ) from None
    if key in _STR_KEYS:
        return raw.strip()
    if key in _INT_KEYS:
        try:
            return int(raw.strip())
        except ValueError:
            raise ConfigParseError(
                f"{key} must be an integer, got {raw.strip()!r}", line=lineno, key=key
            ) from None
    try:
        return float(raw.strip())
    except ValueError:
        raise ConfigParseError(
            f"{key} must be a number, got {raw.strip()!r}", line=lineno, key=key
        ) from None


def parse_config_text(text):
    """Text of a config file -> validated SimParams."""
    assigned = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigParseError(f"expected key = value, got {stripped!r}", line=lineno)
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise ConfigParseError(f"unknown key {key!r}", line=lineno, key=key)
        if key in assigned:
            raise ConfigParseError(f"duplicate key {key!r}", line=lineno, key=key)
        assigned[key] = _convert(key, raw, lineno)
    params = SimParams(**assigned)
    violations = validate_params(params)
    if violations:
        raise ConfigValidationError(violations)
    return params


def parse_config(path):
    """Load and validate a config file; OS level read errors propagate."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
