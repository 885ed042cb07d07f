from __future__ import annotations

import random
import subprocess

import pytest

# vocabulary with strongly predictable trigger words so tiny models can learn
TRIGGERS = {
    "must": "rules_norms",
    "should": "rules_norms",
    "want": "desires_wishes",
    "plan": "plans_goals",
    "likely": "knowledge",
    "can": "world",
    "able": "agent",
}
FILLER = ["the", "cat", "dog", "runs", "home", "they", "we", "now", "here", "go"]


def build_sentence(rng: random.Random, doc_id: str, sent_id: int) -> dict:
    n = rng.randint(5, 9)
    words = [rng.choice(FILLER) for _ in range(n)]
    heads = [-1] + [0] * (n - 1)
    instance = None
    if rng.random() < 0.85:
        t = rng.randrange(1, n - 2)
        trigger = rng.choice(sorted(TRIGGERS))
        words[t] = trigger
        e_start, e_end = t + 1, t + 2  # fixed-length event right after the trigger
        heads = [-1] + [0] * (n - 1)
        heads[e_start] = t  # event head attaches outside the span
        for i in range(e_start + 1, e_end + 1):
            heads[i] = e_start
        instance = {
            "trigger": (t, t),
            "sense": TRIGGERS[trigger],
            "event": (e_start, e_end),
            "head": e_start,
        }
    return {
        "doc_id": doc_id,
        "sent_id": sent_id,
        "words": words,
        "heads": heads,
        "instance": instance,
    }


def write_corpus(path, sentences: list[dict]) -> None:
    """Emit the toolkit's ten-column grammar directly (file contract)."""
    with open(path, "w", encoding="utf-8") as f:
        current_doc = None
        for sent in sentences:
            if sent["doc_id"] != current_doc:
                f.write(f"# doc_id = {sent['doc_id']}\n")
                current_doc = sent["doc_id"]
            f.write(f"# sent_id = {sent['sent_id']}\n")
            n = len(sent["words"])
            trig = ["O"] * n
            head = ["O"] * n
            event = ["O"] * n
            ids = ["_"] * n
            inst = sent["instance"]
            if inst is not None:
                t0, t1 = inst["trigger"]
                trig[t0] = f"S-{inst['sense']}"
                head[inst["head"]] = "H"
                e0, e1 = inst["event"]
                region = list(range(min(t0, e0), max(t1, e1) + 1))
                for j, pos in enumerate(region):
                    role = "T" if t0 <= pos <= t1 else "E"
                    event[pos] = f"{'B' if j == 0 else 'I'}-{role}"
                for pos in set(region) | {inst["head"], t0}:
                    ids[pos] = "0"
            for i, word in enumerate(sent["words"]):
                row = [str(i), word, word.lower(), "NOUN", str(sent["heads"][i]),
                       "dep", trig[i], head[i], event[i], ids[i]]
                f.write("\t".join(row) + "\n")
            f.write("\n")


@pytest.fixture(scope="session")
def toy_data(tmp_path_factory):
    """A toy corpus plus manifest and gold encodings made by the toolkit CLI."""
    root = tmp_path_factory.mktemp("toy_data")
    rng = random.Random(424242)
    sentences = []
    for d in range(3):
        for s in range(20):
            sentences.append(build_sentence(rng, f"doc{d}", s))
    corpus = root / "corpus.conll"
    write_corpus(corpus, sentences)

    def modalkit(*argv):
        proc = subprocess.run(
            ["modalkit", *map(str, argv)], capture_output=True, text=True
        )
        assert proc.returncode == 0, proc.stderr
        return proc

    modalkit("ingest", corpus, "--out", root)  # sanity: the contract file parses
    modalkit("split", "--corpus", corpus, "--seed", "5", "--out", root)
    for scheme in ("trigger_biose:fine_conflated", "trigger_biose:binary",
                   "trigger_biose_feat_head:fine_conflated",
                   "event_span", "event_head", "joint:fine_conflated"):
        modalkit("encode", "--corpus", corpus, "--scheme", scheme,
                 "--all-sequences", "--out", root)
    return root


@pytest.fixture(scope="session")
def tiny_encoder(tmp_path_factory):
    """A miniature randomly initialized encoder + trained BPE tokenizer,
    saved to disk so the normal from_pretrained path is exercised."""
    from tokenizers import Tokenizer, models, pre_tokenizers, processors, trainers
    from transformers import PreTrainedTokenizerFast, RobertaConfig, RobertaModel

    texts = [" ".join(FILLER)] + [
        f"the {w} cat runs home" for w in sorted(TRIGGERS)
    ] * 4
    tok = Tokenizer(models.BPE(unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    trainer = trainers.BpeTrainer(
        vocab_size=220,
        special_tokens=["<s>", "<pad>", "</s>", "<unk>", "<mask>"],
    )
    tok.train_from_iterator(texts, trainer)
    tok.post_processor = processors.TemplateProcessing(
        single="<s> $A </s>",
        pair="<s> $A </s> </s> $B </s>",
        special_tokens=[("<s>", tok.token_to_id("<s>")),
                        ("</s>", tok.token_to_id("</s>"))],
    )
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tok,
        bos_token="<s>", eos_token="</s>", unk_token="<unk>",
        pad_token="<pad>", mask_token="<mask>",
    )
    out = tmp_path_factory.mktemp("tiny_encoder")
    fast.save_pretrained(out)
    config = RobertaConfig(
        vocab_size=len(fast),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=320,
        pad_token_id=fast.pad_token_id,
        bos_token_id=fast.bos_token_id,
        eos_token_id=fast.eos_token_id,
    )
    import torch

    torch.manual_seed(7)
    RobertaModel(config).save_pretrained(out)
    return str(out)
