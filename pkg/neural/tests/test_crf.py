import itertools

import pytest
import torch

from modalkit_neural.crf import LinearChainCRF


def brute_force_scores(crf: LinearChainCRF, emissions: torch.Tensor) -> dict:
    """Score of every possible tag sequence, by full enumeration."""
    n, num_tags = emissions.shape
    scores = {}
    for seq in itertools.product(range(num_tags), repeat=n):
        s = float(crf.start[seq[0]] + emissions[0, seq[0]])
        for t in range(1, n):
            s += float(crf.transitions[seq[t - 1], seq[t]] + emissions[t, seq[t]])
        s += float(crf.end[seq[-1]])
        scores[seq] = s
    return scores


@pytest.fixture
def crf():
    torch.manual_seed(3)
    crf = LinearChainCRF(3)
    with torch.no_grad():
        crf.start.copy_(torch.randn(3))
        crf.end.copy_(torch.randn(3))
        crf.transitions.copy_(torch.randn(3, 3))
    return crf


def test_nll_matches_enumeration(crf):
    torch.manual_seed(11)
    for length in (1, 2, 4):
        emissions = torch.randn(1, length, 3)
        tags = torch.randint(0, 3, (1, length))
        mask = torch.ones(1, length, dtype=torch.bool)
        scores = brute_force_scores(crf, emissions[0])
        log_z = torch.logsumexp(torch.tensor(list(scores.values())), dim=0)
        gold = scores[tuple(tags[0].tolist())]
        expected = float(log_z - gold)
        assert float(crf.nll(emissions, tags, mask)) == pytest.approx(expected, abs=1e-4)


def test_viterbi_matches_enumeration(crf):
    torch.manual_seed(13)
    for length in (1, 2, 4):
        emissions = torch.randn(1, length, 3)
        mask = torch.ones(1, length, dtype=torch.bool)
        scores = brute_force_scores(crf, emissions[0])
        best = max(scores, key=scores.get)
        assert crf.decode(emissions, mask)[0] == list(best)


def test_masked_padding_is_ignored(crf):
    torch.manual_seed(17)
    emissions = torch.randn(1, 3, 3)
    tags = torch.randint(0, 3, (1, 3))
    mask = torch.ones(1, 3, dtype=torch.bool)
    nll_plain = float(crf.nll(emissions, tags, mask))

    padded = torch.zeros(1, 5, 3)
    padded[:, :3] = emissions
    padded_tags = torch.zeros(1, 5, dtype=torch.long)
    padded_tags[:, :3] = tags
    padded_mask = torch.zeros(1, 5, dtype=torch.bool)
    padded_mask[:, :3] = True
    assert float(crf.nll(padded, padded_tags, padded_mask)) == pytest.approx(
        nll_plain, abs=1e-5
    )
    assert crf.decode(padded, padded_mask)[0] == crf.decode(emissions, mask)[0]


def test_training_reduces_nll(crf):
    torch.manual_seed(19)
    emissions = torch.nn.Parameter(torch.randn(4, 6, 3))
    tags = torch.randint(0, 3, (4, 6))
    mask = torch.ones(4, 6, dtype=torch.bool)
    optimizer = torch.optim.Adam([emissions, *crf.parameters()], lr=0.1)
    first = None
    for _ in range(60):
        loss = crf.nll(emissions, tags, mask)
        if first is None:
            first = float(loss)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
    assert float(loss) < first * 0.2
    assert crf.decode(emissions.detach(), mask) == [row.tolist() for row in tags]
