"""Exception hierarchy shared across the pipeline."""


class BaitwatchError(Exception):
    """Base class for all pipeline errors."""


# --- store ---

class OutOfOrderDay(BaitwatchError):
    pass


class DuplicateEvent(BaitwatchError):
    pass


class UnknownUrl(BaitwatchError):
    pass


class NoOnlineObservation(BaitwatchError):
    pass


# --- pdf analysis ---

class MalformedPdf(BaitwatchError):
    pass


class EncryptedPdf(BaitwatchError):
    pass


class RendererUnavailable(BaitwatchError):
    pass


class RenderFailed(BaitwatchError):
    pass


# --- probe ---

class TransportError(BaitwatchError):
    """Network-level failure; distinct from an Offline verdict."""


class AlreadyRetired(BaitwatchError):
    pass


# --- netmeta ---

class UnparsableUrl(BaitwatchError):
    pass


class IpLiteralHost(BaitwatchError):
    pass


class NxDomain(BaitwatchError):
    pass


class WhoisUnavailable(BaitwatchError):
    pass


class QuotaExceeded(BaitwatchError):
    pass


class ProviderError(BaitwatchError):
    pass


# --- hosting ---

class NoLiveSample(BaitwatchError):
    pass


# --- ioc scanner ---

class EmptyCapture(BaitwatchError):
    pass


class NoLinksFound(BaitwatchError):
    pass


class UnknownComponent(BaitwatchError):
    pass


class NoVendorMapping(BaitwatchError):
    pass


class DbUnavailable(BaitwatchError):
    pass


class NotObjectStorageUrl(BaitwatchError):
    pass


class AccessDenied(BaitwatchError):
    pass


class NoSuchBucket(BaitwatchError):
    pass


# --- notify ---

class NoLivePdfs(BaitwatchError):
    pass


class InsufficientHistory(BaitwatchError):
    pass


# --- pipeline ---

class StageFailure(BaitwatchError):
    pass


class ConfigError(BaitwatchError):
    pass
