"""Run configuration: an INI document with a ``[run]`` section and endpoint sections.

Example::

    [run]
    sample_n = 2000
    similarity_threshold = 0.75
    seed = 42
    output_dir = out
    graph_rules = graph_rules.tsv
    vectors = vectors.txt
    idf = idf.txt
    # catalog = my_catalog.tsv      (defaults to the bundled starter catalog)

    [endpoint:bio]
    url = http://localhost:8890/sparql
    version = auto
    timeout = 60
    max_retries = 3
    politeness_delay = 1000

An endpoint may give ``fixture = file.nq`` instead of ``url``; the CLI then
serves that file on a local port for the duration of the command.  Relative
paths are resolved against the directory holding the config file, and a
``package:`` prefix points into the data bundled with lodscope.
Without ``output_dir`` artifacts go to ``./lodscope-out``.
``LODSCOPE_OUTPUT_DIR`` and ``LODSCOPE_SEED`` override the matching keys.
"""

from __future__ import annotations

import configparser
import os
from contextlib import ExitStack, contextmanager
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterator, Optional

from .errors import ConfigError
from .sparql.client import VERSIONS, EndpointDescriptor

ENV_OUTPUT_DIR = "LODSCOPE_OUTPUT_DIR"
ENV_SEED = "LODSCOPE_SEED"


def package_data(relative: str) -> Path:
    return Path(str(resources.files("lodscope") / "data" / relative))


@dataclass(frozen=True)
class EndpointConfig:
    id: str
    url: Optional[str] = None
    fixture: Optional[Path] = None
    version: str = "auto"
    timeout: float = 60.0
    max_retries: int = 3
    politeness_delay: float = 1000.0

    @property
    def location(self) -> str:
        """Stable identifier written into artifacts (no ephemeral ports)."""
        return self.url if self.url else f"fixture:{self.fixture.name}"

    def descriptor(self, url: str | None = None) -> EndpointDescriptor:
        return EndpointDescriptor(self.id, url or self.url, self.version, self.timeout,
                                  self.max_retries, self.politeness_delay)


@dataclass(frozen=True)
class RunConfig:
    endpoints: tuple[EndpointConfig, ...] = ()
    sample_n: int = 2000
    similarity_threshold: float = 0.75
    seed: int = 0
    catalog: Optional[Path] = None
    vectors: Optional[Path] = None
    idf: Optional[Path] = None
    graph_rules: Optional[Path] = None
    output_dir: Path = Path("lodscope-out")
    workers: int = 4
    class_cap: int = 10_000
    mismatch_threshold: int = 1000
    louvain_restarts: int = 8

    def __post_init__(self):
        if self.sample_n <= 0:
            raise ConfigError("sample_n must be positive")
        if not 0 < self.similarity_threshold <= 1:
            raise ConfigError("similarity_threshold must be in (0, 1]")
        if self.workers <= 0:
            raise ConfigError("workers must be positive")
        ids = [e.id for e in self.endpoints]
        if len(set(ids)) != len(ids):
            raise ConfigError("endpoint ids must be unique")

    def endpoint(self, endpoint_id: str) -> EndpointConfig:
        for e in self.endpoints:
            if e.id == endpoint_id:
                return e
        raise ConfigError(f"unknown endpoint {endpoint_id!r}")

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def check_output_dir(self) -> Path:
        out = Path(self.output_dir)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"output directory {out} is not writable: {exc}") from exc
        if not os.access(out, os.W_OK):
            raise ConfigError(f"output directory {out} is not writable")
        return out


def _path(value: str | None, base: Path) -> Optional[Path]:
    if not value:
        return None
    if value.startswith("package:"):
        return package_data(value[len("package:"):])
    p = Path(os.path.expanduser(value))
    return p if p.is_absolute() else base / p


def _get(section, key, conv, default):
    raw = section.get(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return conv(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key}: {exc}") from None


def parse_config(text: str, base_dir: Path | str = ".", env: dict | None = None) -> RunConfig:
    env = os.environ if env is None else env
    base = Path(base_dir)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    known_run = {"sample_n", "similarity_threshold", "seed", "catalog", "vectors", "idf",
                 "graph_rules", "output_dir", "workers", "class_cap", "mismatch_threshold",
                 "louvain_restarts"}
    known_ep = {"url", "fixture", "version", "timeout", "max_retries", "politeness_delay"}
    if not parser.has_section("run"):
        parser.add_section("run")
    run = parser["run"]
    unknown = set(run) - known_run
    if unknown:
        raise ConfigError(f"[run] unknown keys: {', '.join(sorted(unknown))}")
    endpoints = []
    for name in parser.sections():
        if name == "run":
            continue
        if not name.startswith("endpoint:"):
            raise ConfigError(f"unknown section [{name}]")
        sec = parser[name]
        unknown = set(sec) - known_ep
        if unknown:
            raise ConfigError(f"[{name}] unknown keys: {', '.join(sorted(unknown))}")
        url, fixture = sec.get("url"), _path(sec.get("fixture"), base)
        if bool(url) == bool(fixture):
            raise ConfigError(f"[{name}] give exactly one of url or fixture")
        version = sec.get("version", "auto").strip()
        if version not in VERSIONS:
            raise ConfigError(f"[{name}] version must be one of {', '.join(VERSIONS)}")
        ep = EndpointConfig(name.split(":", 1)[1].strip(), url.strip() if url else None, fixture, version,
                            _get(sec, "timeout", float, 60.0), _get(sec, "max_retries", int, 3),
                            _get(sec, "politeness_delay", float, 1000.0))
        if ep.url:
            try:
                ep.descriptor()
            except ValueError as exc:
                raise ConfigError(f"[{name}] {exc}") from None
        endpoints.append(ep)
    seed = _get(run, "seed", int, 0)
    if env.get(ENV_SEED):
        try:
            seed = int(env[ENV_SEED])
        except ValueError:
            raise ConfigError(f"{ENV_SEED} must be an integer") from None
    output_dir = _path(run.get("output_dir"), base) or Path("lodscope-out")
    if env.get(ENV_OUTPUT_DIR):
        output_dir = Path(env[ENV_OUTPUT_DIR])
    return RunConfig(
        endpoints=tuple(endpoints),
        sample_n=_get(run, "sample_n", int, 2000),
        similarity_threshold=_get(run, "similarity_threshold", float, 0.75),
        seed=seed,
        catalog=_path(run.get("catalog"), base),
        vectors=_path(run.get("vectors"), base),
        idf=_path(run.get("idf"), base),
        graph_rules=_path(run.get("graph_rules"), base),
        output_dir=output_dir,
        workers=_get(run, "workers", int, 4),
        class_cap=_get(run, "class_cap", int, 10_000),
        mismatch_threshold=_get(run, "mismatch_threshold", int, 1000),
        louvain_restarts=_get(run, "louvain_restarts", int, 8),
    )


def load_config(path: str | Path, env: dict | None = None) -> RunConfig:
    path = package_data(path[len("package:"):]) if str(path).startswith("package:") else Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, path.parent, env)


@contextmanager
def running_endpoints(config: RunConfig, seed: int | None = None) -> Iterator[dict[str, EndpointDescriptor]]:
    """Descriptors for every configured endpoint, serving fixture files locally."""
    from .simulator import FaultScript, load_fixture, serve

    with ExitStack() as stack:
        out = {}
        for ep in config.endpoints:
            if ep.fixture is not None:
                try:
                    store = load_fixture(ep.fixture)
                except OSError as exc:
                    raise ConfigError(f"cannot read fixture {ep.fixture}: {exc}") from None
                handle = stack.enter_context(serve(store, FaultScript(seed=config.seed if seed is None else seed)))
                out[ep.id] = ep.descriptor(handle.url)
            else:
                out[ep.id] = ep.descriptor()
        yield out
