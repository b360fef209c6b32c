from dataclasses import replace

import numpy as np
import pytest

from entdiss.certificate import FeasibilityCertificate
from entdiss.channels import Noise
from entdiss.states import ghz, w
from entdiss.structure import ClassTag, DissociationClass, build_system
from entdiss.util import UserError
from entdiss.verify import Tolerances, verify_certificate


def trivial(cls_name: str, n: int, noise: str = "local", state: str = "ghz"):
    "the q = 0 certificate: Xi keeps only the identity component"
    cls = DissociationClass.parse(cls_name, n)
    system = build_system(cls, Noise.parse(noise))
    f, *_ = np.linalg.lstsq(system.matrix, system.rhs(0.0), rcond=None)
    return FeasibilityCertificate(
        cls.name, n, noise, 0.0, state, dict(zip(system.unknowns, map(float, f)))
    )


def test_trivial_certificate_verifies():
    for name, n in (("ea", 3), ("dge", 3), ("b", 4), ("d", 4)):
        report = verify_certificate(trivial(name, n))
        assert report.ok, report
        assert report.transfer_residual < 1e-8
        assert report.worst_eigenvalue >= -1e-9


def test_constraint_count():
    report = verify_certificate(trivial("ea", 3))
    # three blocks, each with 4^2 SIC outcomes on its measured qubits
    assert report.constraints_checked == 3 * 16


def test_tampered_q_fails():
    cert = trivial("ea", 3)
    bad = replace(cert, q=0.5)
    report = verify_certificate(bad)
    assert not report.ok
    assert report.transfer_residual > 0.1


def test_negative_f_fails():
    cert = trivial("ea", 3)
    # shifting the identity-weight value breaks the equations too
    f = dict(cert.f)
    f[(1, 2)] = -1.0
    report = verify_certificate(replace(cert, f=f), ghz(3).rho)
    assert not report.ok
    assert report.worst_eigenvalue < 0


def test_explicit_state_matches_name():
    cert = trivial("dge", 3, state="w")
    a = verify_certificate(cert)
    b = verify_certificate(cert, w(3).rho)
    assert a.worst_eigenvalue == pytest.approx(b.worst_eigenvalue)


def test_stricter_tolerances_still_pass():
    report = verify_certificate(trivial("ea", 3), tolerances=Tolerances(1e-12, 1e-12, 1e-12))
    assert report.ok


def test_report_text():
    text = str(verify_certificate(trivial("ea", 3)))
    assert "transfer_residual" in text
    assert text.endswith("valid")


def test_certificate_json():
    cert = trivial("b", 4, "global", "cluster")
    again = FeasibilityCertificate.loads(cert.dumps())
    assert again.f == cert.f
    assert again.cls == DissociationClass(ClassTag.PAIR_CLUSTERS, 4)
    assert again.noise_kind is Noise.GLOBAL
    assert not again.heuristic
    j = cert.to_json()
    assert j["tool"] == "entdiss"
    assert j["class"] == "b"


def test_malformed_certificates():
    good = trivial("ea", 3).to_json()
    bad = [
        "not json",
        "[1, 2]",
        '{"tool": "other"}',
    ]
    for text in bad:
        with pytest.raises(UserError):
            FeasibilityCertificate.loads(text)
    for key in ("q", "f", "class"):
        j = dict(good)
        del j[key]
        with pytest.raises(UserError):
            FeasibilityCertificate.from_json(j)
    with pytest.raises(UserError):
        FeasibilityCertificate.from_json({**good, "class": "b"})
    with pytest.raises(UserError):
        FeasibilityCertificate.from_json({**good, "noise": "amplitude"})
    with pytest.raises(UserError):
        FeasibilityCertificate.from_json({**good, "mode": "maybe"})
