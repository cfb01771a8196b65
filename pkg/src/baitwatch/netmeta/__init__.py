from .urlsplit import SplitUrl, split_url
from .enrich import HostRecord, enrich, extract_emails
from .astables import as_tables, load_alias_map
from .blocklist import BlocklistStatus, blocklist_check, QuotaLimitedClient

__all__ = [
    "SplitUrl", "split_url",
    "HostRecord", "enrich", "extract_emails",
    "as_tables", "load_alias_map",
    "BlocklistStatus", "blocklist_check", "QuotaLimitedClient",
]
