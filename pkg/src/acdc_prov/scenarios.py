"""Worked audit scenarios: enclave encapsulation and a remote voting booth.

Two families of ready-made provenance graphs and policies exercise the
engine end to end. The first records a trusted enclave encapsulating a
user's plaintext under contract; its policies separate "my inputs were
used" from "only my inputs were used", for both the inputs an activity
used and the sources a result was derived from. The second records a
voter walking a fixed ballot workflow (key generation, selection,
printing, verification, counting, receipt printing, optional exit) on a
voting machine acting on their behalf; its policies detect double voting,
blacklisted actors, and skipped workflow steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .evaluator import evaluate
from .events import slice_by_agent
from .graph import ProvGraph, RelationLabel, VertexKind, union
from .policy import BoundPolicy, Environment, bind, parse_policy

__all__ = [
    "VotingStep",
    "BALLOT_STEPS",
    "InvalidStepSequenceError",
    "build_encapsulate_event",
    "build_encapsulate_with_foreign_inputs",
    "build_voting_trace",
    "build_two_state_trace",
    "CorpusPolicy",
    "corpus",
    "corpus_by_name",
    "corpus_graphs",
    "ScenarioCheck",
    "SCENARIO_NAMES",
    "run_scenario",
]

_K = VertexKind
_R = RelationLabel


# ---------------------------------------------------------------------------
# graph builders
# ---------------------------------------------------------------------------


def build_encapsulate_event(owner: str) -> ProvGraph:
    """Provenance of one enclave encapsulation run on behalf of ``owner``.

    An sgx node agent, acting for the owner's account, runs the
    Encapsulate activity under EncapsulateContract: it consumes the
    owner's plaintext, the contract, the enclave key and the owner's key,
    and produces a SecureCapsule derived from all four inputs. The capsule
    and the owner's inputs are attributed to the owner; the enclave key to
    the enclave.
    """
    owner_key = f"Key_{owner}"
    g = ProvGraph()
    g = g.add_vertex(owner, _K.ACCOUNT_AGENT)
    g = g.add_vertex("sgx", _K.NODE_AGENT)
    g = g.add_vertex("Encapsulate", _K.ACTIVITY)
    g = g.add_vertex("Plaintext", _K.DATA_ENTITY)
    g = g.add_vertex("EncapsulateContract", _K.CONTRACT_ENTITY)
    g = g.add_vertex("Key_SGX", _K.KEY_ENTITY)
    g = g.add_vertex(owner_key, _K.KEY_ENTITY)
    g = g.add_vertex("SecureCapsule", _K.DATA_ENTITY)
    g = g.add_edge("sgx", owner, _R.ACTED_ON_BEHALF_OF)
    g = g.add_edge("Encapsulate", "sgx", _R.WAS_ASSOCIATED_WITH)
    for used in ("Plaintext", "EncapsulateContract", "Key_SGX", owner_key):
        g = g.add_edge("Encapsulate", used, _R.USED)
    g = g.add_edge("SecureCapsule", "Encapsulate", _R.WAS_GENERATED_BY)
    for source in ("EncapsulateContract", owner_key, "Plaintext", "Key_SGX"):
        g = g.add_edge("SecureCapsule", source, _R.WAS_DERIVED_FROM)
    g = g.add_edge("Key_SGX", "sgx", _R.WAS_ATTRIBUTED_TO)
    for owned in ("Plaintext", owner_key, "SecureCapsule"):
        g = g.add_edge(owned, owner, _R.WAS_ATTRIBUTED_TO)
    return g


def build_encapsulate_with_foreign_inputs(owner: str, outsider: str) -> ProvGraph:
    """Encapsulation for ``owner`` that also consumed an outsider's inputs.

    Extends the clean run with a key and a plaintext attributed to
    ``outsider`` and fed to Encapsulate as extra inputs. The capsule is
    still derived only from the owner's material, so the derivation
    policies keep holding while the usage-exclusivity ones break.
    """
    foreign_key = f"Key_{outsider}"
    foreign_data = f"Plaintext_{outsider}"
    g = build_encapsulate_event(owner)
    g = g.add_vertex(outsider, _K.ACCOUNT_AGENT)
    g = g.add_vertex(foreign_key, _K.KEY_ENTITY)
    g = g.add_vertex(foreign_data, _K.DATA_ENTITY)
    g = g.add_edge("Encapsulate", foreign_key, _R.USED)
    g = g.add_edge("Encapsulate", foreign_data, _R.USED)
    g = g.add_edge(foreign_key, outsider, _R.WAS_ATTRIBUTED_TO)
    g = g.add_edge(foreign_data, outsider, _R.WAS_ATTRIBUTED_TO)
    return g


class VotingStep(Enum):
    """The ballot workflow functions, in their mandatory order."""

    KEY_GEN = "KeyGen"
    SELECT = "Select"
    PRINT = "Print"
    VERIFY = "Verify"
    COUNT = "Count"
    PRINT_RECEIPT = "PrintReceipt"
    EXIT = "Exit"


BALLOT_STEPS: tuple[VotingStep, ...] = (
    VotingStep.KEY_GEN,
    VotingStep.SELECT,
    VotingStep.PRINT,
    VotingStep.VERIFY,
    VotingStep.COUNT,
    VotingStep.PRINT_RECEIPT,
)

# What each step produces; the tally belongs to the machine, everything
# else to the voter. Exit produces nothing.
_STEP_OUTPUTS: Mapping[VotingStep, tuple[str, VertexKind] | None] = {
    VotingStep.KEY_GEN: ("VoterKey", _K.KEY_ENTITY),
    VotingStep.SELECT: ("Ballot", _K.DATA_ENTITY),
    VotingStep.PRINT: ("PaperBallot", _K.DATA_ENTITY),
    VotingStep.VERIFY: ("VerifiedBallot", _K.DATA_ENTITY),
    VotingStep.COUNT: ("Tally", _K.DATA_ENTITY),
    VotingStep.PRINT_RECEIPT: ("Receipt", _K.DATA_ENTITY),
    VotingStep.EXIT: None,
}


class InvalidStepSequenceError(ValueError):
    """The requested steps do not form a legal ballot workflow prefix."""


def build_voting_trace(
    voter: str, machine: str, steps: Sequence[VotingStep]
) -> ProvGraph:
    """Provenance of ``voter`` running ``steps`` on ``machine``.

    ``steps`` must be a prefix of the ballot workflow, optionally closed
    by Exit. Entering the booth already leaves a trace: even an empty
    step list yields the voter, the machine, and the machine acting on
    the voter's behalf. Each executed step adds its activity, associated
    with the machine, using the step's contract; steps with an output add
    it as generated by the activity, derived from the contract, and
    attributed to the voter (the tally is attributed to the machine).
    """
    steps = tuple(steps)
    core = steps[:-1] if steps and steps[-1] is VotingStep.EXIT else steps
    if VotingStep.EXIT in core:
        raise InvalidStepSequenceError("Exit can only appear as the final step")
    if core != BALLOT_STEPS[: len(core)]:
        order = " -> ".join(s.value for s in BALLOT_STEPS)
        raise InvalidStepSequenceError(
            f"steps must follow {order} in order from the start"
        )

    g = ProvGraph()
    g = g.add_vertex(voter, _K.ACCOUNT_AGENT)
    g = g.add_vertex(machine, _K.NODE_AGENT)
    g = g.add_edge(machine, voter, _R.ACTED_ON_BEHALF_OF)
    for step in steps:
        activity = step.value
        contract = f"{step.value}Contract"
        g = g.add_vertex(activity, _K.ACTIVITY)
        g = g.add_vertex(contract, _K.CONTRACT_ENTITY)
        g = g.add_edge(activity, machine, _R.WAS_ASSOCIATED_WITH)
        g = g.add_edge(activity, contract, _R.USED)
        output = _STEP_OUTPUTS[step]
        if output is not None:
            output_id, output_kind = output
            owner = machine if step is VotingStep.COUNT else voter
            g = g.add_vertex(output_id, output_kind)
            g = g.add_edge(output_id, activity, _R.WAS_GENERATED_BY)
            g = g.add_edge(output_id, contract, _R.WAS_DERIVED_FROM)
            g = g.add_edge(output_id, owner, _R.WAS_ATTRIBUTED_TO)
    return g


def build_two_state_trace(
    voter: str, first_machine: str, second_machine: str
) -> ProvGraph:
    """A completed trace plus a fresh key-generation attempt elsewhere.

    Models the same voter coming back for a second ballot on another
    machine: the first trace ran to completion, the second has only
    reached KeyGen. The second state's vertices are namespaced under the
    machine id, so the two traces share exactly the voter vertex.
    """
    first = build_voting_trace(voter, first_machine, BALLOT_STEPS)
    second = build_voting_trace(voter, second_machine, (VotingStep.KEY_GEN,))
    keep = {voter, second_machine}
    mapping = {
        vid: f"{second_machine}/{vid}" for vid in second.vertices if vid not in keep
    }
    return union(first, second.renamed(mapping))


# ---------------------------------------------------------------------------
# policy corpus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusPolicy:
    """A named policy with source text and its default environment."""

    name: str
    source: str
    environment: Environment

    def bound(
        self, env: Environment | None = None, strict: bool = False
    ) -> BoundPolicy:
        """Parse and bind this policy (against ``env`` when given)."""
        return bind(
            parse_policy(self.source),
            self.environment if env is None else env,
            strict=strict,
        )


def _identity_env(*names: str, sets: Mapping[str, frozenset[str]] | None = None) -> Environment:
    return Environment(constants={n: n for n in names}, sets=dict(sets or {}))


_P1 = "exists k: key_entity . edge(Encapsulate, k, Used)"

_P2 = "exists d: data_entity . edge(Encapsulate, d, Used)"

_P3 = """\
forall k: key_entity .
    edge(Encapsulate, k, Used)
    => (edge(k, Bob, WasAttributedTo)
        or (exists n: node_agent .
            edge(k, n, WasAttributedTo) and edge(n, Bob, ActedOnBehalfOf)))"""

_P4 = """\
forall d: data_entity .
    edge(Encapsulate, d, Used) => edge(d, Bob, WasAttributedTo)"""

_P5 = "exists d: data_entity . edge(SecureCapsule, d, WasDerivedFrom)"

_P6 = "exists k: key_entity . edge(SecureCapsule, k, WasDerivedFrom)"

_P7 = """\
forall k: key_entity .
    edge(SecureCapsule, k, WasDerivedFrom)
    => (edge(k, Bob, WasAttributedTo)
        or (exists n: node_agent .
            edge(k, n, WasAttributedTo) and edge(n, Bob, ActedOnBehalfOf)))"""

_P8 = """\
forall d: data_entity .
    edge(SecureCapsule, d, WasDerivedFrom) => edge(d, Bob, WasAttributedTo)"""

_P9 = "edge(SecureCapsule, EncapsulateContract, WasDerivedFrom)"

_RECEIPT = """\
exists d: data_entity . exists a: activity . exists v: account_agent .
    edge(a, PrintReceiptContract, Used)
    and edge(d, a, WasGeneratedBy)
    and edge(d, PrintReceiptContract, WasDerivedFrom)
    and edge(d, v, WasAttributedTo)"""

_BLACKLISTED = """\
exists b: account_agent .
    member(b, blacklist) and (exists n: node_agent . edge(n, b, ActedOnBehalfOf))"""

_COUNT_DONE = """\
exists d: data_entity . exists a: activity . exists n: node_agent . exists v: account_agent .
    edge(a, CountContract, Used)
    and edge(d, a, WasGeneratedBy)
    and edge(d, CountContract, WasDerivedFrom)
    and edge(d, n, WasAttributedTo)
    and edge(n, v, ActedOnBehalfOf)"""


def _step_completion(var: str, sort: str, contract: str) -> str:
    return (
        f"exists {var}: {sort} . exists a: activity . exists v: account_agent .\n"
        f"    edge(a, {contract}, Used)\n"
        f"    and edge({var}, a, WasGeneratedBy)\n"
        f"    and edge({var}, {contract}, WasDerivedFrom)\n"
        f"    and edge({var}, v, WasAttributedTo)"
    )


def corpus() -> list[CorpusPolicy]:
    """The built-in policy corpus: every entry parses and binds cleanly
    against its default environment."""
    encapsulation = [
        ("p1", _P1, ("Encapsulate",)),
        ("p2", _P2, ("Encapsulate",)),
        ("p3", _P3, ("Encapsulate", "Bob")),
        ("p4", _P4, ("Encapsulate", "Bob")),
        ("p5", _P5, ("SecureCapsule",)),
        ("p6", _P6, ("SecureCapsule",)),
        ("p7", _P7, ("SecureCapsule", "Bob")),
        ("p8", _P8, ("SecureCapsule", "Bob")),
        ("p9", _P9, ("SecureCapsule", "EncapsulateContract")),
    ]
    entries = [
        CorpusPolicy(name, source, _identity_env(*constants))
        for name, source, constants in encapsulation
    ]
    entries.append(
        CorpusPolicy(
            "encapsulate_all",
            "\nand ".join(f"({source})" for _, source, _ in encapsulation),
            _identity_env("Encapsulate", "Bob", "SecureCapsule", "EncapsulateContract"),
        )
    )
    entries.append(
        CorpusPolicy(
            "receipt_attributed", _RECEIPT, _identity_env("PrintReceiptContract")
        )
    )
    entries.append(
        CorpusPolicy(
            "blacklisted_actor",
            _BLACKLISTED,
            Environment(sets={"blacklist": frozenset()}),
        )
    )
    entries.append(
        CorpusPolicy(
            "keygen_done",
            _step_completion("k", "key_entity", "KeyGenContract"),
            _identity_env("KeyGenContract"),
        )
    )
    entries.append(
        CorpusPolicy(
            "select_done",
            _step_completion("d", "data_entity", "SelectContract"),
            _identity_env("SelectContract"),
        )
    )
    entries.append(
        CorpusPolicy(
            "print_done",
            _step_completion("d", "data_entity", "PrintContract"),
            _identity_env("PrintContract"),
        )
    )
    entries.append(
        CorpusPolicy(
            "verify_done",
            _step_completion("d", "data_entity", "VerifyContract"),
            _identity_env("VerifyContract"),
        )
    )
    entries.append(
        CorpusPolicy("count_done", _COUNT_DONE, _identity_env("CountContract"))
    )
    entries.append(
        CorpusPolicy(
            "print_receipt_done", _RECEIPT, _identity_env("PrintReceiptContract")
        )
    )
    return entries


def corpus_by_name() -> dict[str, CorpusPolicy]:
    """The corpus keyed by entry name."""
    return {entry.name: entry for entry in corpus()}


def corpus_graphs() -> dict[str, ProvGraph]:
    """The built-in scenario graphs, keyed by the name they ship under."""
    return {
        "empty": ProvGraph(),
        "encapsulate_bob": build_encapsulate_event("Bob"),
        "encapsulate_foreign_inputs": build_encapsulate_with_foreign_inputs(
            "Bob", "Mallory"
        ),
        "alice_trace_full": build_voting_trace("Alice", "m1", BALLOT_STEPS),
        "alice_two_state": build_two_state_trace("Alice", "m1", "m2"),
        "mallory_trace_to_count": build_voting_trace(
            "Mallory", "m1", BALLOT_STEPS[:5]
        ),
        "bob_trace_full": build_voting_trace("Bob", "m1", BALLOT_STEPS),
    }


# ---------------------------------------------------------------------------
# scenario walkthroughs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioCheck:
    """One expected-vs-actual policy outcome within a scenario."""

    label: str
    policy: str
    expected: bool
    actual: bool

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


def _check(
    label: str,
    policy_name: str,
    graph: ProvGraph,
    expected: bool,
    env: Environment | None = None,
) -> ScenarioCheck:
    entry = corpus_by_name()[policy_name]
    verdict = evaluate(entry.bound(env), graph)
    return ScenarioCheck(label, policy_name, expected, verdict.satisfied)


def _scenario_encapsulate() -> list[ScenarioCheck]:
    base = build_encapsulate_event("Bob")
    tampered = build_encapsulate_with_foreign_inputs("Bob", "Mallory")
    names = [f"p{i}" for i in range(1, 10)] + ["encapsulate_all"]
    checks = [
        _check(f"{name} on Bob's clean encapsulation", name, base, True)
        for name in names
    ]
    with_foreign = {
        "p1": True,
        "p2": True,
        "p3": False,
        "p4": False,
        "p5": True,
        "p6": True,
        "p7": True,
        "p8": True,
        "p9": True,
        "encapsulate_all": False,
    }
    checks += [
        _check(f"{name} with Mallory's inputs mixed in", name, tampered, expected)
        for name, expected in with_foreign.items()
    ]
    return checks


def _scenario_duplicate_vote() -> list[ScenarioCheck]:
    completed = build_voting_trace("Alice", "m1", BALLOT_STEPS)
    in_progress = build_voting_trace("Alice", "m1", BALLOT_STEPS[:5])
    resumed = build_two_state_trace("Alice", "m1", "m2")
    return [
        _check(
            "Alice already holds a receipt: refuse a second ballot",
            "receipt_attributed",
            slice_by_agent(completed, "Alice"),
            True,
        ),
        _check(
            "no receipt printed yet: let Alice continue",
            "receipt_attributed",
            slice_by_agent(in_progress, "Alice"),
            False,
        ),
        _check(
            "receipt found across machines: refuse the resumed attempt",
            "receipt_attributed",
            slice_by_agent(resumed, "Alice"),
            True,
        ),
    ]


def _scenario_blacklist() -> list[ScenarioCheck]:
    trace = build_voting_trace("Bob", "m1", BALLOT_STEPS)
    listed = Environment(sets={"blacklist": frozenset({"Bob"})})
    return [
        _check(
            "Bob is blacklisted: his trace is flagged",
            "blacklisted_actor",
            trace,
            True,
            env=listed,
        ),
        _check(
            "empty blacklist: nothing to flag",
            "blacklisted_actor",
            trace,
            False,
        ),
    ]


_STEP_POLICY_NAMES = (
    "keygen_done",
    "select_done",
    "print_done",
    "verify_done",
    "count_done",
    "print_receipt_done",
)


def _scenario_manipulation() -> list[ScenarioCheck]:
    checks = []
    for done in range(len(BALLOT_STEPS) + 1):
        trace = build_voting_trace("Mallory", "m1", BALLOT_STEPS[:done])
        for position, name in enumerate(_STEP_POLICY_NAMES):
            checks.append(
                _check(
                    f"{name} after {done} of {len(BALLOT_STEPS)} steps",
                    name,
                    trace,
                    position < done,
                )
            )
    return checks


_SCENARIOS = {
    "encapsulate": _scenario_encapsulate,
    "duplicate-vote": _scenario_duplicate_vote,
    "blacklist": _scenario_blacklist,
    "manipulation": _scenario_manipulation,
}

SCENARIO_NAMES: tuple[str, ...] = tuple(_SCENARIOS)


def run_scenario(name: str) -> list[ScenarioCheck]:
    """Run a named scenario and report its expected-vs-actual outcomes."""
    try:
        runner = _SCENARIOS[name]
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; choose from {', '.join(SCENARIO_NAMES)}"
        ) from None
    return runner()
