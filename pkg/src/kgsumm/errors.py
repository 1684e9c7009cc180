"""Exception hierarchy.

Every domain error carries a short ``code`` that the CLI reports in its
machine-readable error payload.
"""

from __future__ import annotations


class KGSummError(Exception):
    """Base class for domain errors (CLI exit code 2)."""

    code = "KGSummError"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.details = details

    def to_dict(self) -> dict:
        payload = {"error": self.code, "message": str(self)}
        payload.update({k: v for k, v in self.details.items() if v is not None})
        return payload


def _make(name: str, doc: str) -> type[KGSummError]:
    return type(name, (KGSummError,), {"code": name, "__doc__": doc})


FutureTimestamp = _make("FutureTimestamp", "A rating timestamp lies after the reference time t0.")
UnknownNode = _make("UnknownNode", "A node id is referenced but was never declared.")
DuplicateRating = _make("DuplicateRating", "The same (user, item) pair is rated twice.")
KindMismatch = _make("KindMismatch", "A node has the wrong kind for its role.")
InvalidEdge = _make("InvalidEdge", "An edge is malformed (e.g. a self-loop).")
UnknownEdge = _make("UnknownEdge", "A node pair is not adjacent in the graph.")
ParseError = _make("ParseError", "An input line could not be parsed.")
InvalidPath = _make("InvalidPath", "An explanation path is structurally invalid.")
EmptyScenario = _make("EmptyScenario", "No explanation paths match the scenario.")
InvalidScenario = _make("InvalidScenario", "Scenario subjects do not fit the scenario kind.")
DegenerateTerminals = _make("DegenerateTerminals", "Fewer than two terminals.")
DisconnectedTerminals = _make("DisconnectedTerminals", "Some terminals cannot be reached.")
OracleTooLarge = _make("OracleTooLarge", "Instance too large for exhaustive enumeration.")
NoEdges = _make("NoEdges", "Weighted prizes need at least one edge.")
EmptyExplanation = _make("EmptyExplanation", "The explanation has no edges or nodes.")
SeriesTooShort = _make("SeriesTooShort", "Consistency needs at least two summaries.")
InfeasibleSpec = _make("InfeasibleSpec", "Synthetic graph degree targets cannot be met.")
IsolatedUser = _make("IsolatedUser", "A user has no incident edges to walk from.")
InsufficientPopulation = _make("InsufficientPopulation", "Not enough nodes to sample from.")
