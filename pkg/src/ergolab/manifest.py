"""Self-contained JSON manifests and their exact re-verification.

A manifest records the command, the full configuration (rationals as "p/q"
strings), and the outputs including every verified claim. `verify_manifest`
re-derives each claim from the recorded inputs and outputs alone and
compares both the truth value and the exact quantities, so tampering with
any rational in a verified claim is detected.

Serialization is canonical (sorted keys, fixed separators) so identical
configurations produce byte-identical manifests.
"""

from __future__ import annotations

import json
from typing import List, Tuple

from .construct import (
    ConstructionCertificate,
    FlattenLedger,
    FlattenStep,
    VerifiedClaim,
    _ledger_claims,
    recheck_approximate,
    recheck_flatten,
    recheck_targets,
)
from .errors import VerificationError
from .intervals import IntervalSet
from .rationals import format_fraction, parse_fraction
from .sequences import NormalizingSequence

SCHEMA = "ergolab.manifest/1"
TOOL_VERSION = "0.1.0"


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


def certificate_to_json(cert: ConstructionCertificate):
    return {
        "kind": cert.kind,
        "inputs": cert.inputs,
        "parameters": cert.parameters,
        "output_set": cert.output_set.to_json(),
        "claims": [c.to_json() for c in cert.verified],
        "intermediates": cert.intermediates,
    }


def ledger_to_json(ledger: FlattenLedger, a: IntervalSet, steps: int,
                   seq: NormalizingSequence):
    return {
        "kind": "flatten_seq",
        "inputs": {
            "A": a.to_json(),
            "eps": format_fraction(ledger.eps),
            "K": steps,
            "seq": seq.to_json(),
        },
        "eps": format_fraction(ledger.eps),
        "steps": [
            {
                "k": s.k,
                "eps_k": format_fraction(s.eps_k),
                "n_k": s.n_k,
                "theta_step": format_fraction(s.theta_step),
            }
            for s in ledger.steps
        ],
        "final_set": ledger.final_set.to_json(),
        "claims": [c.to_json() for c in ledger.verified],
    }


def build_manifest(command: str, config, outputs) -> dict:
    return {
        "schema": SCHEMA,
        "tool": {"name": "ergolab", "version": TOOL_VERSION},
        "deterministic": True,
        "command": command,
        "config": config,
        "outputs": outputs,
    }


def write_manifest(path, manifest: dict):
    text = canonical_json(manifest)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def read_manifest(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def verify_manifest(manifest: dict) -> Tuple[bool, List[str]]:
    """Re-run every verified claim from scratch and compare exactly."""
    report: List[str] = []
    if manifest.get("schema") != SCHEMA:
        return False, [f"unknown schema {manifest.get('schema')!r}"]
    outputs = manifest.get("outputs", {})
    cert = outputs.get("certificate")
    if cert is None:
        return False, ["manifest carries no certificate to verify"]
    kind = cert.get("kind")
    try:
        if kind == "flatten_seq":
            fresh = _recheck_ledger(cert)
        else:
            fresh = _recheck_certificate(cert)
    except Exception as exc:  # recomputation itself failed
        return False, [f"recomputation failed: {exc}"]
    stored = [VerifiedClaim.from_json(c) for c in cert.get("claims", [])]
    ok = True
    if len(stored) != len(fresh):
        return False, [
            f"claim count mismatch: stored {len(stored)}, recomputed {len(fresh)}"
        ]
    for s, f in zip(stored, fresh):
        line_ok = s.claim_id == f.claim_id and s.holds and f.holds
        if s.quantities != f.quantities:
            line_ok = False
        ok = ok and line_ok
        status = "ok" if line_ok else "FAIL"
        report.append(f"{status}: {s.claim_id}")
        if not line_ok and s.quantities != f.quantities:
            diffs = {
                key: (s.quantities.get(key), f.quantities.get(key))
                for key in set(s.quantities) | set(f.quantities)
                if s.quantities.get(key) != f.quantities.get(key)
            }
            report.append(f"      mismatch {diffs}")
    return ok, report


def _recheck_certificate(cert) -> List[VerifiedClaim]:
    kind = cert["kind"]
    inputs = cert["inputs"]
    parameters = cert["parameters"]
    output_set = IntervalSet.from_json(cert["output_set"])
    seq = NormalizingSequence.from_json(inputs["seq"])
    if kind == "approximate":
        return recheck_approximate(inputs, parameters, output_set, seq)
    if kind == "flatten":
        return recheck_flatten(inputs, parameters, output_set, seq)
    if kind == "targets":
        return recheck_targets(
            inputs, parameters, output_set, cert.get("intermediates", {}), seq
        )
    raise VerificationError(f"unknown certificate kind {kind!r}")


def _recheck_ledger(cert) -> List[VerifiedClaim]:
    seq = NormalizingSequence.from_json(cert["inputs"]["seq"])
    eps = parse_fraction(cert["eps"])
    final_set = IntervalSet.from_json(cert["final_set"])
    rows = [
        FlattenStep(
            k=int(r["k"]),
            eps_k=parse_fraction(r["eps_k"]),
            n_k=int(r["n_k"]),
            theta_step=parse_fraction(r["theta_step"]),
        )
        for r in cert["steps"]
    ]
    return _ledger_claims(rows, final_set, eps, seq)
