import json

import pytest

from defeq.certificates import (
    CertificateError, chain_json, dumps, intertranslation_json, merger_from_json, merger_json,
    model_merge_json, parse_deltas, print_deltas, renaming_json, verify_certificate, witness_model,
)
from defeq.definability import DefinitionSet, chain_from_mergers, verify_merge
from defeq.demo import run_demo
from defeq.modelrel import check_model_merge
from defeq.parser import ParseError
from defeq.renaming import fresh_renaming, renaming_to_merger
from defeq.translation import check_intertranslatable


def _through_json(obj):
    return json.loads(dumps(obj))


def test_delta_text_round_trip(corpus):
    d = corpus.d23
    assert parse_deltas(print_deltas(d, "D23"), corpus.t2.signature) == d


def test_delta_text_errors(corpus):
    sig = corpus.t1.signature
    with pytest.raises(ParseError):
        parse_deltas("rel q one\n", sig)
    with pytest.raises(ParseError):
        parse_deltas("rel q 1\ndef A x0 . q(x0) -> p(x0)\n", sig)
    with pytest.raises(ParseError):
        parse_deltas("bogus\n", sig)


def test_merger_certificate_round_trip(corpus):
    c = corpus
    m = verify_merge(c.t1, c.t3, c.d13, c.d31, 2)
    obj = _through_json(merger_json(m))
    assert merger_from_json(obj) == m
    assert verify_certificate(obj) == (True, "merger of T1 and T3 verified at bound 2")


def test_refuted_merger_keeps_witness(corpus):
    c = corpus
    bad = verify_merge(c.t2, c.t3, DefinitionSet(c.t2.signature, c.d13), c.d31, 2)
    obj = _through_json(merger_json(bad))
    assert obj["verified"] is False
    assert witness_model(obj, c.t2.signature | c.t3.signature) == bad.witness
    ok, msg = verify_certificate(obj)
    assert not ok and "refuted" in msg


def test_tampered_certificate_is_caught(corpus):
    c = corpus
    obj = _through_json(merger_json(verify_merge(c.t1, c.t3, c.d13, c.d31, 2)))
    obj["deltas"][0] = ["A x0 . q(x0) <-> ~p(x0)"]
    ok, _ = verify_certificate(obj)
    assert not ok


def test_bound_override(corpus):
    c = corpus
    obj = _through_json(merger_json(verify_merge(c.t1, c.t3, c.d13, c.d31, 1)))
    ok, msg = verify_certificate(obj, 3)
    assert ok and "bound 3" in msg


def test_malformed_certificates():
    with pytest.raises(CertificateError):
        verify_certificate({"kind": "merger"})
    with pytest.raises(CertificateError):
        verify_certificate({"kind": "nonsense", "bound": 2})
    with pytest.raises(CertificateError):
        verify_certificate({"kind": "merger", "bound": 2, "verified": True,
                            "theories": ["theory A\n", "theory B\n"], "deltas": [["junk"], []]})


def test_demo_bundle_reverifies():
    report = run_demo(2, 3)
    assert report.ok
    for obj in _through_json(report.bundle())["certificates"]:
        ok, msg = verify_certificate(obj)
        assert ok == obj["verified"] is True, msg


def test_other_kinds(corpus):
    c = corpus
    r = fresh_renaming(c.t1.signature)
    assert verify_certificate(_through_json(renaming_json(c.t1, r, renaming_to_merger(c.t1, r, 2))))[0]
    chain = chain_from_mergers([verify_merge(c.t1, c.t3, c.d13, c.d31, 2)])
    assert verify_certificate(_through_json(chain_json(chain, True)))[0]
    tr12, tr21 = c.negation(c.t1, c.t2), c.negation(c.t2, c.t1)
    res = check_intertranslatable(tr12, tr21, 2)
    assert verify_certificate(_through_json(intertranslation_json(tr12, tr21, res)))[0]
    w = check_model_merge(c.t1, c.t3, c.d13, c.d31, 2)
    assert verify_certificate(_through_json(model_merge_json(c.t1, c.t3, c.d13, c.d31, w)))[0]
