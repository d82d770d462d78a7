"""Apple-tasting repeated game: round loop, feedback masking, mistake accounting.

The engine runs a deterministic learner against an adversary for a fixed
number of rounds.  The learner observes the true label only on rounds where
it predicts 1.  On rounds where the learner predicts 0 the adversary may
leave the label deferred and commit it during finalization; the lower-bound
strategies depend on this.

Two game kinds share the engine: ``"experts"`` games, where each round's
instance is a 0/1 prediction vector (one bit per expert), and ``"instances"``
games, where the instance is an integer id into a finite domain.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

import numpy as np

EXPERTS = "experts"
INSTANCES = "instances"

DEFERRED = -1  # label placeholder until the adversary commits


class ProtocolError(RuntimeError):
    """The learner or adversary violated the game protocol."""


class GameDomainError(ValueError):
    """An emitted instance lies outside the declared domain."""


@dataclass(frozen=True)
class MistakeReport:
    """Mistake counts of one finished game."""

    total: int
    false_positives: int
    false_negatives: int

    def __post_init__(self):
        assert self.total == self.false_positives + self.false_negatives


@dataclass
class Certificate:
    """Names the witness realizing the game's labels up to ``realizability_k``.

    ``predictions`` records the witness's own prediction on every round, so a
    certificate can be verified without re-deriving the witness's behaviour.
    """

    witness: int
    predictions: np.ndarray


@dataclass(frozen=True)
class Round:
    """One round of a finished transcript."""

    t: int  # 1-based
    instance: object
    prediction: int
    label: int
    feedback_visible: int


@dataclass
class Transcript:
    """Full record of one learner-vs-adversary game."""

    kind: str
    instances: np.ndarray  # (T, n) expert predictions, or (T,) instance ids
    predictions: np.ndarray  # learner outputs, shape (T,)
    labels: np.ndarray  # true labels, DEFERRED until committed
    realizability_k: int = 0
    certificate: Optional[Certificate] = None

    @property
    def horizon(self) -> int:
        return int(len(self.predictions))

    @property
    def feedback_visible(self) -> np.ndarray:
        # visible exactly when the learner predicted 1
        return self.predictions.copy()

    @property
    def finalized(self) -> bool:
        return bool((self.labels != DEFERRED).all())

    def rounds(self) -> list[Round]:
        out = []
        for i in range(self.horizon):
            inst = self.instances[i]
            if self.kind == EXPERTS:
                inst = np.asarray(inst)
            else:
                inst = int(inst)
            out.append(
                Round(
                    t=i + 1,
                    instance=inst,
                    prediction=int(self.predictions[i]),
                    label=int(self.labels[i]),
                    feedback_visible=int(self.predictions[i]),
                )
            )
        return out


def _check_instance(kind, x, n_experts, domain_size):
    if kind == EXPERTS:
        x = np.asarray(x)
        if x.shape != (n_experts,):
            raise GameDomainError(
                f"expected prediction vector of length {n_experts}, got shape {x.shape}"
            )
        if not np.isin(x, (0, 1)).all():
            raise GameDomainError("expert predictions must be 0/1 bits")
        return x.astype(np.uint8)
    xi = int(x)
    if not 0 <= xi < domain_size:
        raise GameDomainError(f"instance {xi} outside domain of size {domain_size}")
    return xi


def run_game(learner, adversary, T: int) -> Transcript:
    """Play ``T`` rounds of the apple-tasting game and return the transcript.

    The learner receives the true label only on rounds where it predicted 1.
    Labels the adversary left deferred are committed by ``adversary.finalize()``
    before the transcript is returned; a label still missing afterwards is a
    protocol violation.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    kind = adversary.kind
    n_experts = getattr(adversary, "n_experts", 0)
    domain_size = getattr(adversary, "domain_size", 0)
    start = getattr(adversary, "start", None)
    if start is not None:
        start(T)

    if kind == EXPERTS:
        instances = np.zeros((T, n_experts), dtype=np.uint8)
    else:
        instances = np.zeros(T, dtype=np.int64)
    predictions = np.zeros(T, dtype=np.uint8)
    labels = np.full(T, DEFERRED, dtype=np.int8)

    for i in range(T):
        t = i + 1
        x = _check_instance(kind, adversary.instance(t), n_experts, domain_size)
        instances[i] = x
        yhat = int(learner.predict(x))
        if yhat not in (0, 1):
            raise ProtocolError(f"learner prediction must be 0/1, got {yhat}")
        y = adversary.label(t, yhat)
        predictions[i] = yhat
        if yhat == 1:
            if y is None:
                raise ProtocolError(f"adversary deferred the label on round {t} with prediction 1")
            labels[i] = int(y)
            learner.update(x, 1, int(y))
        else:
            if y is not None:
                labels[i] = int(y)  # early commitment is always legal
            learner.update(x, 0, None)

    committed, certificate = adversary.finalize()
    for t, y in committed.items():
        i = t - 1
        if predictions[i] == 1 and labels[i] != int(y):
            raise ProtocolError(f"adversary tried to rewrite the revealed label of round {t}")
        labels[i] = int(y)
    if (labels == DEFERRED).any():
        missing = int(np.flatnonzero(labels == DEFERRED)[0]) + 1
        raise ProtocolError(f"adversary finalization left round {missing} uncommitted")

    return Transcript(
        kind=kind,
        instances=instances,
        predictions=predictions,
        labels=labels.astype(np.int8),
        realizability_k=int(getattr(adversary, "realizability_k", 0)),
        certificate=certificate,
    )


def score(transcript: Transcript) -> MistakeReport:
    """Count total mistakes and their false-positive/false-negative split."""
    if not transcript.finalized:
        raise ProtocolError("transcript contains deferred labels; cannot score")
    yhat = transcript.predictions.astype(np.int64)
    y = transcript.labels.astype(np.int64)
    fp = int(((yhat == 1) & (y == 0)).sum())
    fn = int(((yhat == 0) & (y == 1)).sum())
    return MistakeReport(total=fp + fn, false_positives=fp, false_negatives=fn)


def verify_certificate(transcript: Transcript) -> bool:
    """True iff the certificate witness disagrees with the true labels on at
    most ``realizability_k`` rounds."""
    cert = transcript.certificate
    if cert is None:
        raise ProtocolError("transcript carries no certificate")
    if not transcript.finalized:
        raise ProtocolError("transcript contains deferred labels")
    preds = np.asarray(cert.predictions, dtype=np.int64)
    if preds.shape != (transcript.horizon,):
        raise ProtocolError("certificate prediction record has wrong length")
    disagreements = int((preds != transcript.labels.astype(np.int64)).sum())
    return disagreements <= transcript.realizability_k


def replay_predictions(learner, transcript: Transcript) -> np.ndarray:
    """Re-run a fresh learner over a transcript's instance stream.

    Labels are revealed exactly on rounds where the replayed learner predicts 1,
    taken from the transcript.  Used by the feedback-masking tests: mutating
    labels on rounds hidden from the original learner must not change the
    replayed prediction sequence.
    """
    out = np.zeros(transcript.horizon, dtype=np.uint8)
    for i in range(transcript.horizon):
        x = transcript.instances[i]
        p = int(learner.predict(x))
        out[i] = p
        if p == 1:
            learner.update(x, 1, int(transcript.labels[i]))
        else:
            learner.update(x, 0, None)
    return out


# ---------------------------------------------------------------------------
# Transcript serialization: CSV, one row per round.
# ---------------------------------------------------------------------------

CSV_HEADER = ["t", "instance", "yhat", "y", "feedback_visible"]


def write_transcript_csv(transcript: Transcript, fh: IO[str]) -> None:
    w = csv.writer(fh)
    w.writerow(CSV_HEADER)
    for r in transcript.rounds():
        if transcript.kind == EXPERTS:
            inst = "".join(str(int(b)) for b in r.instance)
        else:
            inst = str(r.instance)
        w.writerow([r.t, inst, r.prediction, r.label, r.feedback_visible])


def read_transcript_csv(fh: IO[str], kind: str, realizability_k: int = 0) -> Transcript:
    rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("not a transcript CSV")
    body = rows[1:]
    T = len(body)
    predictions = np.zeros(T, dtype=np.uint8)
    labels = np.zeros(T, dtype=np.int8)
    if kind == EXPERTS:
        n = len(body[0][1]) if body else 0
        instances = np.zeros((T, n), dtype=np.uint8)
    else:
        instances = np.zeros(T, dtype=np.int64)
    for i, row in enumerate(body):
        if int(row[0]) != i + 1:
            raise ValueError("transcript rows out of order")
        if kind == EXPERTS:
            instances[i] = np.frombuffer(row[1].encode(), dtype=np.uint8) - ord("0")
        else:
            instances[i] = int(row[1])
        predictions[i] = int(row[2])
        labels[i] = int(row[3])
        if int(row[4]) != int(row[2]):
            raise ValueError("feedback_visible must equal yhat")
    return Transcript(
        kind=kind,
        instances=instances,
        predictions=predictions,
        labels=labels,
        realizability_k=realizability_k,
    )
