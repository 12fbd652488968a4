"""Shared key=value config file format.

Lines are `key = value`; blank lines and # comments are ignored.
Values stay strings here; commands coerce what they need.
"""

from .errors import ConfigError


def parse_config_text(text, source="<config>"):
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("%s:%d: expected key=value" % (source, lineno))
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError("%s:%d: empty key" % (source, lineno))
        out[key] = value.strip()
    return out


def load_config(path):
    try:
        with open(path) as fh:
            return parse_config_text(fh.read(), source=str(path))
    except OSError as exc:
        raise ConfigError(str(exc))


def merged(config, overrides):
    """Config dict updated with non-None override values."""
    out = dict(config)
    for key, value in overrides.items():
        if value is not None:
            out[key] = str(value)
    return out


def get_typed(config, key, kind, default=None):
    if key not in config or config[key] == "":
        if default is None and key not in config:
            raise ConfigError("missing config key: %s" % key)
        return default
    raw = config[key]
    try:
        if kind is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return kind(raw)
    except ValueError:
        raise ConfigError("config key %s: cannot parse %r as %s"
                          % (key, raw, kind.__name__))
