"""Registry client: resolves `category/package_name` refs against a registry
root (local directory or plain HTTP tree), keeps fetched packages in a
content-addressed cache for offline reuse, and binds manifests to runnable
sampler/problem factories.

Registry tree layout::

    <root>/package/<category>/<name>/manifest.json
    <root>/package/<category>/<name>/README.md
    <root>/package/<category>/<name>/...        (plugin scripts, images, example/)

Environment: ``BBOHUB_CACHE_DIR`` overrides the cache location,
``BBOHUB_REGISTRY_ROOT`` overrides the default (bundled) registry root.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import shutil
import tempfile
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from filelock import FileLock

from . import samplers as samplers_mod
from .benchmarks import BenchmarkSpec, Problem, make_bbob, make_bi_sphere
from .errors import (
    BindingError,
    CacheCorruptionError,
    FetchError,
    ManifestError,
    NotExecutableError,
    RefParseError,
    ValidationError,
)
from .plugin import PluginSampler, plugin_evaluate, shutdown_plugin, spawn_plugin
from .samplers.base import Sampler
from .space import Direction, SearchSpace

CATEGORIES = ("samplers", "benchmarks", "pruners", "visualization")
EXECUTABLE_CATEGORIES = ("samplers", "benchmarks")

_NAME_RE = re.compile(r"^[a-z0-9_]+$")
_VERSION_RE = re.compile(r"^\d+(\.\d+)*$")
_TAG_RE = re.compile(r"^[a-z0-9][a-z0-9_-]*$")

MANIFEST_REQUIRED_FIELDS = ("name", "category", "version", "summary", "authors", "license", "tags", "entry")
MANIFEST_OPTIONAL_FIELDS = ("defaults", "dependencies")


# --------------------------------------------------------------------------
# refs


@dataclass(frozen=True)
class PackageRef:
    category: str
    name: str

    def __str__(self) -> str:
        return f"{self.category}/{self.name}"


def parse_ref(text: str) -> PackageRef:
    """Parse "category/package_name"; the parse error carries the offending
    position in the input."""
    if text.count("/") != 1:
        raise RefParseError(
            f"ref {text!r} must be 'category/package_name' with exactly one '/'", position=0
        )
    category, name = text.split("/")
    if category not in CATEGORIES:
        raise RefParseError(f"unknown category {category!r} in {text!r} (expected one of {list(CATEGORIES)})", position=0)
    if not _NAME_RE.match(name):
        bad = next((i for i, c in enumerate(name) if not re.match(r"[a-z0-9_]", c)), len(category) + 1)
        raise RefParseError(
            f"package name {name!r} must match [a-z0-9_]+", position=len(category) + 1 + bad
        )
    return PackageRef(category=category, name=name)


def format_ref(ref: PackageRef) -> str:
    return str(ref)


# --------------------------------------------------------------------------
# manifests


@dataclass
class PackageManifest:
    name: str
    category: str
    version: str
    summary: str
    authors: list[str]
    license: str
    tags: list[str]
    entry: dict
    defaults: dict = field(default_factory=dict)
    dependencies: list[str] = field(default_factory=list)

    @property
    def ref(self) -> PackageRef:
        return PackageRef(category=self.category, name=self.name)


def parse_manifest(data: Any) -> tuple[PackageManifest, list[str]]:
    """Validate raw manifest JSON; returns the manifest plus warnings for
    tolerated oddities (unknown fields, denormalized tags)."""
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    warnings: list[str] = []
    missing = [f for f in MANIFEST_REQUIRED_FIELDS if f not in data]
    if missing:
        raise ManifestError(f"manifest missing required fields: {missing}")
    unknown = sorted(set(data) - set(MANIFEST_REQUIRED_FIELDS) - set(MANIFEST_OPTIONAL_FIELDS))
    for fname in unknown:
        warnings.append(f"unknown manifest field {fname!r}")

    name = data["name"]
    if not isinstance(name, str) or not _NAME_RE.match(name):
        raise ManifestError(f"manifest name {name!r} must match [a-z0-9_]+")
    category = data["category"]
    if category not in CATEGORIES:
        raise ManifestError(f"manifest category {category!r} not in {list(CATEGORIES)}")
    version = data["version"]
    if not isinstance(version, str) or not _VERSION_RE.match(version):
        raise ManifestError(f"manifest version {version!r} must be dotted integers")
    summary = data["summary"]
    if not isinstance(summary, str) or not summary.strip() or "\n" in summary.strip():
        raise ManifestError("manifest summary must be a non-empty single line")
    authors = data["authors"]
    if not isinstance(authors, list) or not authors or not all(isinstance(a, str) and a for a in authors):
        raise ManifestError("manifest authors must be a non-empty list of strings")
    license_id = data["license"]
    if not isinstance(license_id, str) or not license_id.strip():
        raise ManifestError("manifest license must be a non-empty identifier")

    raw_tags = data["tags"]
    if not isinstance(raw_tags, list) or not all(isinstance(t, str) for t in raw_tags):
        raise ManifestError("manifest tags must be a list of strings")
    tags = []
    for tag in raw_tags:
        normalized = normalize_tag(tag)
        if tag != normalized:
            warnings.append(f"tag {tag!r} normalized to {normalized!r}")
        if not _TAG_RE.match(normalized):
            raise ManifestError(f"tag {tag!r} cannot be normalized to [a-z0-9_-]+")
        tags.append(normalized)

    entry = data["entry"]
    if not isinstance(entry, dict) or entry.get("kind") not in ("builtin", "plugin"):
        raise ManifestError("manifest entry must be an object with kind 'builtin' or 'plugin'")
    if entry["kind"] == "builtin":
        if not isinstance(entry.get("id"), str) or not entry["id"]:
            raise ManifestError("builtin entry requires an 'id'")
    else:
        command = entry.get("command")
        if not isinstance(command, list) or not command or not all(isinstance(c, str) for c in command):
            raise ManifestError("plugin entry requires a non-empty argv 'command' list")
        if entry.get("protocol") != 1:
            raise ManifestError(f"plugin protocol {entry.get('protocol')!r} unsupported (host speaks 1)")

    defaults = data.get("defaults", {})
    if not isinstance(defaults, dict):
        raise ManifestError("manifest defaults must be an object")
    dependencies = data.get("dependencies", [])
    if not isinstance(dependencies, list) or not all(isinstance(d, str) for d in dependencies):
        raise ManifestError("manifest dependencies must be a list of strings")

    manifest = PackageManifest(
        name=name,
        category=category,
        version=version,
        summary=summary.strip(),
        authors=list(authors),
        license=license_id.strip(),
        tags=tags,
        entry=dict(entry),
        defaults=dict(defaults),
        dependencies=list(dependencies),
    )
    return manifest, warnings


def normalize_tag(tag: str) -> str:
    return re.sub(r"\s+", "-", tag.strip().lower())


# --------------------------------------------------------------------------
# content-addressed cache


def compute_digest(files: dict[str, bytes]) -> str:
    """SHA-256 over a canonical archive: sorted relative paths, each framed
    as path NUL length-prefix content."""
    digest = hashlib.sha256()
    for rel in sorted(files):
        data = files[rel]
        digest.update(rel.encode("utf-8") + b"\0")
        digest.update(len(data).to_bytes(8, "big"))
        digest.update(data)
    return digest.hexdigest()


@dataclass
class CacheEntry:
    ref: str
    version: str
    content_digest: str
    fetched_at: str
    files: list[str]

    def to_dict(self) -> dict:
        return {
            "ref": self.ref,
            "version": self.version,
            "content_digest": self.content_digest,
            "fetched_at": self.fetched_at,
            "files": list(self.files),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CacheEntry":
        return cls(
            ref=data["ref"],
            version=data["version"],
            content_digest=data["content_digest"],
            fetched_at=data["fetched_at"],
            files=list(data["files"]),
        )


def default_cache_dir() -> Path:
    env = os.environ.get("BBOHUB_CACHE_DIR")
    if env:
        return Path(env)
    xdg = os.environ.get("XDG_CACHE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".cache"
    return base / "bbohub"


def default_registry_root() -> str:
    env = os.environ.get("BBOHUB_REGISTRY_ROOT")
    if env:
        return env
    return str(resources.files("bbohub").joinpath("data/registry"))


class PackageCache:
    """Digest-keyed object store plus a (ref, version) -> digest index.

    Object directories are published write-then-rename, so readers never see
    partial packages; same-ref fetches serialize on an advisory lock file.
    """

    def __init__(self, cache_dir: str | Path | None = None):
        self.root = Path(cache_dir) if cache_dir is not None else default_cache_dir()
        self.objects = self.root / "objects"
        self.locks = self.root / "locks"
        self.index_path = self.root / "index.json"

    def _ensure_layout(self) -> None:
        self.objects.mkdir(parents=True, exist_ok=True)
        self.locks.mkdir(parents=True, exist_ok=True)

    def ref_lock(self, ref: PackageRef) -> FileLock:
        self._ensure_layout()
        return FileLock(self.locks / f"{ref.category}__{ref.name}.lock")

    def _index_lock(self) -> FileLock:
        self._ensure_layout()
        return FileLock(self.locks / "index.lock")

    def _read_index(self) -> dict:
        if not self.index_path.exists():
            return {"entries": {}, "current": {}}
        with open(self.index_path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    def _write_index(self, index: dict) -> None:
        tmp = self.index_path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(index, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, self.index_path)

    def object_dir(self, digest: str) -> Path:
        return self.objects / digest

    def store(self, ref: PackageRef, version: str, files: dict[str, bytes]) -> CacheEntry:
        """Publish package files under their content digest and point the
        (ref, version) index entry at it."""
        self._ensure_layout()
        digest = compute_digest(files)
        final = self.object_dir(digest)
        if not final.exists():
            tmp = Path(tempfile.mkdtemp(prefix=f".{digest[:12]}-", dir=self.objects))
            try:
                for rel, data in files.items():
                    target = tmp / rel
                    target.parent.mkdir(parents=True, exist_ok=True)
                    target.write_bytes(data)
                try:
                    os.replace(tmp, final)
                except OSError:
                    # lost a publish race; the other writer's identical
                    # content is already in place
                    shutil.rmtree(tmp, ignore_errors=True)
            except BaseException:
                shutil.rmtree(tmp, ignore_errors=True)
                raise
        entry = CacheEntry(
            ref=str(ref),
            version=version,
            content_digest=digest,
            fetched_at=datetime.now(timezone.utc).isoformat(),
            files=sorted(files),
        )
        with self._index_lock():
            index = self._read_index()
            index["entries"][f"{ref}@{version}"] = entry.to_dict()
            index["current"][str(ref)] = version
            self._write_index(index)
        return entry

    def lookup(self, ref: PackageRef, version: str | None = None) -> CacheEntry | None:
        index = self._read_index()
        if version is None:
            version = index["current"].get(str(ref))
            if version is None:
                return None
        raw = index["entries"].get(f"{ref}@{version}")
        return CacheEntry.from_dict(raw) if raw else None

    def entries(self) -> list[CacheEntry]:
        index = self._read_index()
        return [CacheEntry.from_dict(raw) for _, raw in sorted(index["entries"].items())]

    def read_files(self, entry: CacheEntry) -> dict[str, bytes]:
        """Load and re-verify a cached package; any drift from the recorded
        digest is corruption."""
        obj = self.object_dir(entry.content_digest)
        files: dict[str, bytes] = {}
        for rel in entry.files:
            path = obj / rel
            if not path.is_file():
                raise CacheCorruptionError(f"{entry.ref}: cached file {rel!r} missing")
            files[rel] = path.read_bytes()
        digest = compute_digest(files)
        if digest != entry.content_digest:
            raise CacheCorruptionError(
                f"{entry.ref}: cache digest mismatch (expected {entry.content_digest[:12]}..., got {digest[:12]}...)"
            )
        return files

    def verify(self, entry: CacheEntry) -> None:
        self.read_files(entry)


# --------------------------------------------------------------------------
# fetching


def _is_http_root(root: str) -> bool:
    return root.startswith("http://") or root.startswith("https://")


def _http_get(url: str, timeout: float) -> bytes | None:
    """GET a registry file; None for a clean 404, FetchError if unreachable."""
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except urllib.error.HTTPError as exc:
        if exc.code == 404:
            return None
        raise FetchError(f"registry returned HTTP {exc.code} for {url}") from None
    except (urllib.error.URLError, OSError, TimeoutError) as exc:
        raise FetchError(f"registry root unreachable: {url} ({exc})", root_unreachable=True) from None


_README_ASSET_RE = re.compile(r"!\[[^\]]*\]\(([^)\s]+)\)")


def _referenced_files(manifest: PackageManifest, readme_text: str | None) -> list[str]:
    """Relative package files named by the manifest or README: plugin argv
    entries and image references. Used to enumerate HTTP packages, which have
    no directory listing."""
    rels: list[str] = []
    if manifest.entry.get("kind") == "plugin":
        for token in manifest.entry.get("command", []):
            if _is_safe_relpath(token):
                rels.append(token)
    if readme_text:
        for match in _README_ASSET_RE.finditer(readme_text):
            target = match.group(1)
            if not urllib.parse.urlparse(target).scheme and _is_safe_relpath(target):
                rels.append(target)
    return rels


def _is_safe_relpath(token: str) -> bool:
    if not token or token.startswith(("/", "-")) or "\\" in token:
        return False
    parts = token.split("/")
    return all(p not in ("", ".", "..") for p in parts) and "." in parts[-1]


def _read_remote_package(root: str, ref: PackageRef, timeout: float = 10.0) -> dict[str, bytes]:
    base = root.rstrip("/") + f"/package/{ref.category}/{ref.name}/"
    manifest_bytes = _http_get(base + "manifest.json", timeout)
    if manifest_bytes is None:
        raise FetchError(f"package {ref} not present at registry root {root}")
    try:
        manifest, _ = parse_manifest(json.loads(manifest_bytes.decode("utf-8")))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ManifestError(f"{ref}: manifest.json is not valid JSON: {exc}") from None
    files = {"manifest.json": manifest_bytes}
    readme_bytes = _http_get(base + "README.md", timeout)
    readme_text = None
    if readme_bytes is not None:
        files["README.md"] = readme_bytes
        readme_text = readme_bytes.decode("utf-8", errors="replace")
    for rel in _referenced_files(manifest, readme_text):
        data = _http_get(base + rel, timeout)
        if data is not None:
            files[rel] = data
    return files


def _read_local_package(root: str, ref: PackageRef) -> dict[str, bytes]:
    root_path = Path(root)
    if not root_path.is_dir():
        raise FetchError(f"registry root unreachable: {root}", root_unreachable=True)
    pkg_dir = root_path / "package" / ref.category / ref.name
    if not pkg_dir.is_dir():
        raise FetchError(f"package {ref} not present at registry root {root}")
    files: dict[str, bytes] = {}
    for path in sorted(pkg_dir.rglob("*")):
        if path.is_file():
            files[path.relative_to(pkg_dir).as_posix()] = path.read_bytes()
    return files


def fetch_package(
    ref: PackageRef | str,
    registry_root: str | None = None,
    *,
    cache: PackageCache | None = None,
    no_network: bool = False,
) -> CacheEntry:
    """Fetch a package into the cache, or serve it from the cache when the
    root is unreachable (or ``no_network`` forces cache-only resolution)."""
    if isinstance(ref, str):
        ref = parse_ref(ref)
    cache = cache or PackageCache()
    root = registry_root if registry_root is not None else default_registry_root()

    with cache.ref_lock(ref):
        if no_network:
            entry = cache.lookup(ref)
            if entry is None:
                raise FetchError(f"{ref}: not in cache and network use is disabled")
            cache.verify(entry)
            return entry
        try:
            if _is_http_root(root):
                files = _read_remote_package(root, ref)
            else:
                files = _read_local_package(root, ref)
        except FetchError as fetch_exc:
            if fetch_exc.root_unreachable:
                entry = cache.lookup(ref)
                if entry is not None:
                    cache.verify(entry)
                    return entry
            raise

        if "manifest.json" not in files:
            raise ManifestError(f"{ref}: package has no manifest.json")
        try:
            manifest, _ = parse_manifest(json.loads(files["manifest.json"].decode("utf-8")))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ManifestError(f"{ref}: manifest.json is not valid JSON: {exc}") from None
        if manifest.category != ref.category or manifest.name != ref.name:
            raise ManifestError(
                f"manifest identifies itself as {manifest.category}/{manifest.name}, fetched as {ref}"
            )
        return cache.store(ref, manifest.version, files)


# --------------------------------------------------------------------------
# binding manifests to runnable factories


def _bbob_factory(options: dict) -> Problem:
    known = {"function_id", "dimension", "instance"}
    unknown = set(options) - known
    if unknown:
        raise ValidationError(f"unknown bbob options: {sorted(unknown)}")
    spec = BenchmarkSpec(
        function_id=int(options.get("function_id", 1)),
        dimension=int(options.get("dimension", 2)),
        instance=int(options.get("instance", 0)),
    )
    return make_bbob(spec)


def _bi_sphere_factory(options: dict) -> Problem:
    known = {"dimension", "offset"}
    unknown = set(options) - known
    if unknown:
        raise ValidationError(f"unknown bi_sphere options: {sorted(unknown)}")
    return make_bi_sphere(int(options.get("dimension", 2)), float(options.get("offset", 1.0)))


BUILTIN_PROBLEMS: dict[str, Callable[[dict], Problem]] = {
    "benchmarks/bbob": _bbob_factory,
    "benchmarks/bi_sphere": _bi_sphere_factory,
}


def builtin_id_known(builtin_id: str) -> bool:
    return builtin_id in BUILTIN_PROBLEMS or builtin_id in samplers_mod.BUILTIN_SAMPLER_REFS


class LoadedPackage:
    """A fetched package bound to its metadata and, for sampler/benchmark
    categories, an instantiation factory."""

    def __init__(self, ref: PackageRef, manifest: PackageManifest, entry: CacheEntry, root: Path):
        self.ref = ref
        self.manifest = manifest
        self.cache_entry = entry
        self.root = root

    @property
    def executable(self) -> bool:
        return self.ref.category in EXECUTABLE_CATEGORIES

    def readme(self) -> str:
        path = self.root / "README.md"
        return path.read_text(encoding="utf-8") if path.is_file() else ""

    def instantiate(self, **overrides):
        """Build the Sampler (category samplers) or Problem (category
        benchmarks) from manifest defaults merged with overrides."""
        if not self.executable:
            raise NotExecutableError(
                f"{self.ref.category} packages carry metadata only and cannot be instantiated"
            )
        options = {**self.manifest.defaults, **overrides}
        entry = self.manifest.entry
        if entry["kind"] == "builtin":
            return self._instantiate_builtin(entry["id"], options)
        return self._instantiate_plugin(entry, options)

    def _instantiate_builtin(self, builtin_id: str, options: dict):
        if self.ref.category == "samplers":
            if builtin_id not in samplers_mod.BUILTIN_SAMPLER_REFS:
                raise BindingError(f"unknown builtin sampler id {builtin_id!r}")
            return samplers_mod.make_builtin_sampler(builtin_id, options)
        factory = BUILTIN_PROBLEMS.get(builtin_id)
        if factory is None:
            raise BindingError(f"unknown builtin problem id {builtin_id!r}")
        return factory(options)

    def _resolve_command(self, command: list[str]) -> list[str]:
        resolved = []
        for token in command:
            candidate = self.root / token
            resolved.append(str(candidate) if candidate.is_file() else token)
        return resolved

    def _instantiate_plugin(self, entry: dict, options: dict):
        command = self._resolve_command(entry["command"])
        if self.ref.category == "samplers":
            handle = spawn_plugin(command, "sampler", cwd=str(self.root))
            return PluginSampler(handle, ref=str(self.ref), options=options)

        space_spec = options.pop("search_space", None)
        directions_spec = options.pop("directions", None)
        if space_spec is None or directions_spec is None:
            raise BindingError(
                f"{self.ref}: plugin problems must declare search_space and directions "
                "(manifest defaults or overrides)"
            )
        space = SearchSpace.from_dict(space_spec) if not isinstance(space_spec, SearchSpace) else space_spec
        directions = [Direction.parse(d) for d in directions_spec]
        handle = spawn_plugin(command, "problem", cwd=str(self.root))
        return Problem(
            search_space=space,
            directions=directions,
            evaluator=lambda params: plugin_evaluate(handle, params, n_values=len(directions)),
            name=str(self.ref),
            metadata=dict(options),
            closer=lambda: shutdown_plugin(handle),
        )


def load_module(
    ref: PackageRef | str,
    registry_root: str | None = None,
    *,
    cache: PackageCache | None = None,
    no_network: bool = False,
) -> LoadedPackage:
    """Fetch (or cache-hit) a package and return its bound handle."""
    if isinstance(ref, str):
        ref = parse_ref(ref)
    cache = cache or PackageCache()
    entry = fetch_package(ref, registry_root, cache=cache, no_network=no_network)
    files = cache.read_files(entry)  # verifies the digest
    manifest, _ = parse_manifest(json.loads(files["manifest.json"].decode("utf-8")))
    return LoadedPackage(ref, manifest, entry, cache.object_dir(entry.content_digest))


# --------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    package_dir: str
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_package(package_dir: str | Path) -> ValidationReport:
    """Static checks a package must pass before publication: manifest schema,
    README presence, tag charset, and a resolvable entry. Findings land in
    the report; an empty-error report means publishable."""
    package_dir = Path(package_dir)
    report = ValidationReport(package_dir=str(package_dir))
    if not package_dir.is_dir():
        report.errors.append(f"package directory {package_dir} does not exist")
        return report

    manifest = None
    manifest_path = package_dir / "manifest.json"
    if not manifest_path.is_file():
        report.errors.append("manifest.json required")
    else:
        try:
            raw = json.loads(manifest_path.read_text(encoding="utf-8"))
            manifest, warnings = parse_manifest(raw)
            report.warnings.extend(warnings)
        except json.JSONDecodeError as exc:
            report.errors.append(f"manifest.json is not valid JSON: {exc}")
        except ManifestError as exc:
            report.errors.append(str(exc))

    readme_path = package_dir / "README.md"
    if not readme_path.is_file() or not readme_path.read_text(encoding="utf-8").strip():
        report.errors.append("README.md required")

    if manifest is not None:
        if manifest.name != package_dir.name:
            report.errors.append(
                f"manifest name {manifest.name!r} does not match directory {package_dir.name!r}"
            )
        parent = package_dir.parent.name
        if parent in CATEGORIES and manifest.category != parent:
            report.errors.append(
                f"manifest category {manifest.category!r} does not match directory category {parent!r}"
            )
        entry = manifest.entry
        if entry["kind"] == "builtin":
            if not builtin_id_known(entry["id"]):
                report.errors.append(f"unknown builtin id {entry['id']!r}")
        else:
            command = entry.get("command", [])
            if not any((package_dir / token).is_file() for token in command):
                report.errors.append(f"plugin command {command!r} names no file in the package")
    return report
