import pytest

from desync_lab.ledger import (
    FD_TOLERANCE,
    DiscrepancyLedger,
    StarLedgerEntry,
    discrepancy_ledger,
    single_hop_entry,
    star_entry,
)


@pytest.fixture(scope="module")
def ledger():
    return discrepancy_ledger(ns_single=(4, 5, 6, 7), ns_star=(6, 8))


def test_mask_exact_is_certified(ledger):
    assert ledger.certified_variant == "mask-exact"
    assert all(entry.matching_variant == "mask-exact" for entry in ledger.star)


def test_banded_variants_are_rejected():
    entry = star_entry(10)
    assert entry.errors["mask-exact"] <= FD_TOLERANCE
    assert entry.errors["closed-form"] > FD_TOLERANCE
    assert entry.errors["printed"] > FD_TOLERANCE


def test_single_hop_has_no_zero_eigenvalue(ledger):
    for entry in ledger.single_hop:
        assert entry.fd_error < FD_TOLERANCE
        assert not entry.has_zero_eigenvalue
        assert entry.min_eigen_modulus > 1e-3
        assert entry.root_agreement < 1e-6


def test_single_hop_entry_sizes():
    assert single_hop_entry(12).n == 12


def test_mixed_matches_are_not_certified():
    ledger = DiscrepancyLedger(
        star=(
            StarLedgerEntry(6, {"mask-exact": 0.0}, "mask-exact"),
            StarLedgerEntry(8, {"mask-exact": 1.0}, None),
        ),
        single_hop=(),
    )
    assert ledger.certified_variant is None
