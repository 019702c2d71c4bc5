"""Exception hierarchy shared across the engine, registry, plugins, and CLI."""

from __future__ import annotations


class BboHubError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(BboHubError):
    """Input violates a declared invariant (bounds, arity, finiteness, schema)."""


class ConfigurationError(BboHubError):
    """Study, sampler, and problem do not fit together."""


class UnsupportedSpaceError(ConfigurationError):
    """A sampler cannot operate on the given search space."""


class NotFoundError(BboHubError):
    """A referenced trial or result does not exist."""


class JournalCorruptionError(BboHubError):
    """Journal record failed its integrity check or sequence rule."""

    def __init__(self, message: str, seq: int | None = None):
        super().__init__(message)
        self.seq = seq


class SamplerError(BboHubError):
    """The bound sampler failed to produce a suggestion."""

    def __init__(self, message: str, sampler_ref: str | None = None):
        super().__init__(message)
        self.sampler_ref = sampler_ref


class SamplerContractError(SamplerError):
    """The sampler returned params outside the declared search space."""

    def __init__(self, message: str, sampler_ref: str | None = None, params: dict | None = None):
        super().__init__(message, sampler_ref)
        self.params = params


# --- registry ---


class RegistryError(BboHubError):
    """Base for registry resolution, fetch, and cache failures."""


class RefParseError(RegistryError):
    """A package reference string could not be parsed."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(message)
        self.position = position


class FetchError(RegistryError):
    """Registry root unreachable and no usable cache entry.

    ``root_unreachable`` distinguishes "could not reach the root at all"
    (eligible for cache fallback) from "root answered but the package is
    missing or broken".
    """

    def __init__(self, message: str, root_unreachable: bool = False):
        super().__init__(message)
        self.root_unreachable = root_unreachable


class CacheCorruptionError(RegistryError):
    """Cached files no longer match their recorded content digest."""


class ManifestError(RegistryError):
    """manifest.json is missing, unparsable, or violates the schema."""


class BindingError(RegistryError):
    """A manifest entry cannot be bound to runnable code."""


class NotExecutableError(RegistryError):
    """The package category carries metadata only (no runnable factory)."""


# --- plugin protocol ---


class PluginError(BboHubError):
    """Base for subprocess plugin failures."""


class PluginStartupError(PluginError):
    """Plugin process failed to start or complete the handshake."""


class PluginProtocolError(PluginError):
    """Plugin emitted a malformed or unexpected message."""


class PluginVersionError(PluginError):
    """Plugin negotiated an unsupported protocol version."""


class PluginTimeoutError(PluginError):
    """Plugin did not answer within the configured timeout."""


class PluginCapabilityError(PluginError):
    """Plugin lacks the capability required for the request."""


class PluginStateError(PluginError):
    """Request issued against a handle that is not ready."""


class PluginContractError(PluginError):
    """Plugin answered, but the payload violates the sampler/problem contract."""

    def __init__(self, message: str, params: dict | None = None):
        super().__init__(message)
        self.params = params
