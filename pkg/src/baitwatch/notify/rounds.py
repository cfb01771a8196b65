"""Send calendar: three treatment rounds ten days apart, control at day 30."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

from .contacts import CONTROL, TREATMENT

TREATMENT_OFFSETS = (0, 10, 20)
CONTROL_OFFSET = 30


@dataclass(frozen=True)
class SendEvent:
    send_date: date
    round_no: int             # 1..3 treatment, 4 = control closing send
    group: str
    contact: str


def schedule_rounds(start_date: date, contact_group: dict,
                    bounced_round1=frozenset(), opted_out=frozenset()) -> list:
    """Calendar of sends given contact -> group.

    Contacts that hard-bounced in round 1 drop out of every later send,
    including the control-group closing send; opted-out contacts likewise
    disappear from everything after round 1.
    """
    removed = set(bounced_round1) | set(opted_out)
    events = []
    for contact in sorted(contact_group):
        group = contact_group[contact]
        if group == TREATMENT:
            for round_no, offset in enumerate(TREATMENT_OFFSETS, start=1):
                if round_no > 1 and contact in removed:
                    continue
                events.append(SendEvent(start_date + timedelta(days=offset),
                                        round_no, TREATMENT, contact))
        elif group == CONTROL:
            if contact in removed:
                continue
            events.append(SendEvent(start_date + timedelta(days=CONTROL_OFFSET),
                                    4, CONTROL, contact))
    events.sort(key=lambda e: (e.send_date, e.contact))
    return events
