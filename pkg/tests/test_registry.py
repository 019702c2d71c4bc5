"""Registry resolution, the content-addressed cache, offline behavior, and
manifest binding."""

import json
import threading
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import support
from bbohub.benchmarks import Problem
from bbohub.errors import (
    CacheCorruptionError,
    FetchError,
    ManifestError,
    NotExecutableError,
    RefParseError,
)
from bbohub.registry import (
    CATEGORIES,
    PackageCache,
    PackageRef,
    compute_digest,
    fetch_package,
    format_ref,
    load_module,
    parse_manifest,
    parse_ref,
    validate_package,
)
from bbohub.samplers.auto import AutoSampler


class TestParseRef:
    def test_sampler_ref(self):
        assert parse_ref("samplers/auto_sampler") == PackageRef("samplers", "auto_sampler")

    def test_benchmark_ref(self):
        assert parse_ref("benchmarks/bbob") == PackageRef("benchmarks", "bbob")

    def test_missing_slash(self):
        with pytest.raises(RefParseError):
            parse_ref("bbob")

    def test_unknown_category(self):
        with pytest.raises(RefParseError, match="category"):
            parse_ref("models/bbob")

    def test_bad_charset_reports_position(self):
        with pytest.raises(RefParseError) as err:
            parse_ref("samplers/Bad-Name")
        assert err.value.position > 0

    @settings(max_examples=50)
    @given(
        st.sampled_from(CATEGORIES),
        st.from_regex(r"[a-z0-9_]{1,12}", fullmatch=True),
    )
    def test_parse_format_identity(self, category, name):
        text = f"{category}/{name}"
        assert format_ref(parse_ref(text)) == text


class TestManifestSchema:
    def _raw(self, **overrides):
        raw = {
            "name": "demo",
            "category": "samplers",
            "version": "1.2.0",
            "summary": "A demo.",
            "authors": ["a"],
            "license": "MIT",
            "tags": ["demo"],
            "entry": {"kind": "builtin", "id": "samplers/random"},
        }
        raw.update(overrides)
        return raw

    def test_valid_manifest(self):
        manifest, warnings = parse_manifest(self._raw())
        assert manifest.name == "demo"
        assert warnings == []

    def test_missing_fields(self):
        with pytest.raises(ManifestError, match="missing"):
            parse_manifest({"name": "demo"})

    def test_unknown_field_warns(self):
        _, warnings = parse_manifest(self._raw(homepage="https://x"))
        assert any("homepage" in w for w in warnings)

    def test_tag_normalization_warns(self):
        manifest, warnings = parse_manifest(self._raw(tags=["Multi-Objective"]))
        assert manifest.tags == ["multi-objective"]
        assert any("multi-objective" in w for w in warnings)

    def test_bad_version(self):
        with pytest.raises(ManifestError, match="version"):
            parse_manifest(self._raw(version="1.x"))

    def test_plugin_protocol_must_be_one(self):
        entry = {"kind": "plugin", "command": ["python3", "p.py"], "protocol": 2}
        with pytest.raises(ManifestError, match="protocol"):
            parse_manifest(self._raw(entry=entry))


class TestDigest:
    def test_order_independent_and_content_sensitive(self):
        files_a = {"a.txt": b"1", "b.txt": b"2"}
        files_b = {"b.txt": b"2", "a.txt": b"1"}
        assert compute_digest(files_a) == compute_digest(files_b)
        assert compute_digest({"a.txt": b"1", "b.txt": b"3"}) != compute_digest(files_a)

    def test_path_sensitive(self):
        assert compute_digest({"a.txt": b"1"}) != compute_digest({"b.txt": b"1"})


class TestFetchAndCache:
    def _fixture_root(self, tmp_path):
        root = tmp_path / "registry"
        support.write_package(root, "samplers", "demo")
        return root

    def test_fetch_round_trip(self, tmp_path):
        root = self._fixture_root(tmp_path)
        entry = fetch_package("samplers/demo", str(root))
        assert entry.files == ["README.md", "manifest.json"]
        assert entry.version == "1.0.0"
        cache = PackageCache()
        assert (cache.object_dir(entry.content_digest) / "README.md").is_file()

    def test_offline_after_first_fetch(self, tmp_path):
        root = self._fixture_root(tmp_path)
        first = fetch_package("samplers/demo", str(root))
        cache = PackageCache()
        before = cache.read_files(first)

        # unreachable root: a path that does not exist
        second = fetch_package("samplers/demo", str(tmp_path / "gone"))
        assert second.content_digest == first.content_digest
        assert cache.read_files(second) == before

    def test_no_network_with_cold_cache(self, tmp_path):
        root = self._fixture_root(tmp_path)
        with pytest.raises(FetchError, match="network"):
            fetch_package("samplers/demo", str(root), no_network=True)

    def test_no_network_serves_cache(self, tmp_path):
        root = self._fixture_root(tmp_path)
        fetch_package("samplers/demo", str(root))
        entry = fetch_package("samplers/demo", str(root), no_network=True)
        assert entry.ref == "samplers/demo"

    def test_package_missing_at_reachable_root(self, tmp_path):
        root = self._fixture_root(tmp_path)
        with pytest.raises(FetchError, match="not present"):
            fetch_package("samplers/other", str(root))

    def test_tampered_cache_detected(self, tmp_path):
        root = self._fixture_root(tmp_path)
        entry = fetch_package("samplers/demo", str(root))
        cache = PackageCache()
        victim = cache.object_dir(entry.content_digest) / "README.md"
        victim.write_text("tampered", encoding="utf-8")
        with pytest.raises(CacheCorruptionError, match="digest"):
            fetch_package("samplers/demo", str(tmp_path / "gone"))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_random_tampering_always_detected(self, tmp_path_factory, seed):
        tmp_path = tmp_path_factory.mktemp("tamper")
        root = tmp_path / "registry"
        support.write_package(
            root, "samplers", "demo",
            extra_files={"example/run.py": "print('hi')\n", "notes.txt": "abc\n"},
        )
        cache = PackageCache(tmp_path / "cache")
        entry = fetch_package("samplers/demo", str(root), cache=cache)
        rng = np.random.default_rng(seed)
        target = entry.files[int(rng.integers(len(entry.files)))]
        path = cache.object_dir(entry.content_digest) / target
        original = bytearray(path.read_bytes())
        if not original:
            original = bytearray(b"x")
        else:
            pos = int(rng.integers(len(original)))
            original[pos] ^= 0xFF
        path.write_bytes(bytes(original))
        with pytest.raises(CacheCorruptionError):
            cache.verify(entry)

    def test_version_pinning_keeps_both_entries(self, tmp_path):
        root = tmp_path / "registry"
        support.write_package(root, "samplers", "demo", manifest_extra={"version": "1.0.0"})
        fetch_package("samplers/demo", str(root))
        support.write_package(root, "samplers", "demo", manifest_extra={"version": "2.0.0"})
        fetch_package("samplers/demo", str(root))
        cache = PackageCache()
        versions = {e.version for e in cache.entries()}
        assert versions == {"1.0.0", "2.0.0"}
        assert cache.lookup(parse_ref("samplers/demo")).version == "2.0.0"  # current
        assert cache.lookup(parse_ref("samplers/demo"), "1.0.0").version == "1.0.0"

    def test_concurrent_fetches_of_same_ref(self, tmp_path):
        root = self._fixture_root(tmp_path)
        results, errors = [], []

        def fetch():
            try:
                results.append(fetch_package("samplers/demo", str(root)))
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=fetch) for _ in range(6)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        assert len({e.content_digest for e in results}) == 1


class TestHttpRegistry:
    @pytest.fixture()
    def http_root(self, tmp_path):
        root = tmp_path / "registry"
        support.write_package(
            root, "samplers", "webdemo",
            readme="# Web Demo\n\n![thumb](shot.png)\n\n```python\nprint(1)\n```\n",
            extra_files={"shot.png": "not-really-a-png"},
        )
        handler = lambda *args, **kwargs: SimpleHTTPRequestHandler(*args, directory=str(root), **kwargs)
        server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        yield f"http://127.0.0.1:{server.server_address[1]}"
        server.shutdown()

    def test_fetch_over_http(self, http_root):
        entry = fetch_package("samplers/webdemo", http_root)
        assert "manifest.json" in entry.files
        assert "README.md" in entry.files
        assert "shot.png" in entry.files  # referenced by the README

    def test_http_then_offline(self, http_root, tmp_path):
        first = fetch_package("samplers/webdemo", http_root)
        second = fetch_package("samplers/webdemo", "http://127.0.0.1:1")  # connection refused
        assert second.content_digest == first.content_digest


class TestLoadModule:
    def test_builtin_sampler_factory(self, tmp_path):
        loaded = load_module("samplers/auto_sampler")  # bundled default registry
        sampler = loaded.instantiate()
        assert isinstance(sampler, AutoSampler)
        assert loaded.manifest.category == "samplers"

    def test_builtin_problem_with_overrides(self):
        loaded = load_module("benchmarks/bbob")
        problem = loaded.instantiate(function_id=1, dimension=2)
        assert isinstance(problem, Problem)
        assert problem.evaluate({"x0": 3.0, "x1": 4.0}) == [25.0]

    def test_defaults_merge_with_overrides(self):
        loaded = load_module("benchmarks/bbob")
        problem = loaded.instantiate(dimension=4)  # function_id from defaults
        assert len(problem.search_space) == 4

    def test_metadata_only_categories(self, tmp_path):
        root = tmp_path / "registry"
        support.write_package(
            root, "visualization", "plots",
            entry={"kind": "builtin", "id": "none"},
        )
        loaded = load_module("visualization/plots", str(root))
        assert not loaded.executable
        assert loaded.manifest.summary
        with pytest.raises(NotExecutableError):
            loaded.instantiate()

    def test_unknown_builtin_id(self, tmp_path):
        root = tmp_path / "registry"
        support.write_package(
            root, "samplers", "ghost", entry={"kind": "builtin", "id": "samplers/ghost"}
        )
        from bbohub.errors import BindingError

        loaded = load_module("samplers/ghost", str(root))
        with pytest.raises(BindingError, match="ghost"):
            loaded.instantiate()

    def test_offline_idempotent_bytes(self, tmp_path):
        root = tmp_path / "registry"
        support.write_package(root, "samplers", "demo")
        loaded = load_module("samplers/demo", str(root))
        cache = PackageCache()
        before = cache.read_files(loaded.cache_entry)

        again = load_module("samplers/demo", str(tmp_path / "nowhere"))
        assert cache.read_files(again.cache_entry) == before
        assert again.readme() == loaded.readme()


class TestValidatePackage:
    def test_complete_fixture_is_publishable(self, tmp_path):
        pkg = support.write_package(tmp_path / "registry", "samplers", "demo")
        report = validate_package(pkg)
        assert report.ok
        assert report.errors == []

    def test_missing_readme(self, tmp_path):
        pkg = support.write_package(tmp_path / "registry", "samplers", "demo")
        (pkg / "README.md").unlink()
        report = validate_package(pkg)
        assert any("README.md required" in e for e in report.errors)

    def test_empty_readme(self, tmp_path):
        pkg = support.write_package(tmp_path / "registry", "samplers", "demo")
        (pkg / "README.md").write_text("  \n", encoding="utf-8")
        assert not validate_package(pkg).ok

    def test_tag_normalization_warning(self, tmp_path):
        pkg = support.write_package(tmp_path / "registry", "samplers", "demo", tags=["Multi-Objective"])
        report = validate_package(pkg)
        assert report.ok
        assert any("'multi-objective'" in w for w in report.warnings)

    def test_unknown_field_warning(self, tmp_path):
        pkg = support.write_package(
            tmp_path / "registry", "samplers", "demo", manifest_extra={"downloads": 7}
        )
        report = validate_package(pkg)
        assert report.ok
        assert any("downloads" in w for w in report.warnings)

    def test_plugin_command_file_must_exist(self, tmp_path):
        pkg = support.write_package(
            tmp_path / "registry", "samplers", "demo",
            entry={"kind": "plugin", "command": ["python3", "plugin.py"], "protocol": 1},
        )
        report = validate_package(pkg)
        assert any("plugin command" in e for e in report.errors)
        (pkg / "plugin.py").write_text("print()\n", encoding="utf-8")
        assert validate_package(pkg).ok

    def test_category_dir_mismatch(self, tmp_path):
        pkg = support.write_package(
            tmp_path / "registry", "benchmarks", "demo",
            manifest_extra={"category": "samplers"},
        )
        report = validate_package(pkg)
        assert any("category" in e for e in report.errors)

    def test_bundled_registry_is_fully_publishable(self):
        from bbohub.registry import default_registry_root
        from pathlib import Path

        root = Path(default_registry_root()) / "package"
        packages = sorted(p for p in root.glob("*/*") if p.is_dir())
        assert len(packages) == 7
        for pkg in packages:
            report = validate_package(pkg)
            assert report.ok, (pkg, report.errors)
