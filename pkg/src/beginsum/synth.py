"""Synthetic discussion-thread generator.

Each thread gets its own topic: a small set of content words sampled
from a shared lexicon. The initial post uses topic words; every reply is
either salient (each sentence shares at least min_overlap of its content
words with the post, label 1) or a distractor (content words drawn from
the lexicon outside the topic, label 0). The reference summary is the
initial post plus the salient replies.

Because topics vary per thread, whether a reply is salient cannot be
read off its words alone; it is only decidable relative to the thread's
beginning. That is precisely the signal begin-attention models can
exploit and plain ones cannot.
"""

import math
import random
from dataclasses import dataclass

from beginsum.corpus import RawThread

CONTENT_WORDS = [
    "anchor", "basket", "bridge", "candle", "canyon", "carpet", "cellar",
    "cliff", "cloud", "copper", "corner", "cotton", "desert", "engine",
    "fabric", "falcon", "feather", "fountain", "garden", "glacier",
    "hammer", "harbor", "hollow", "island", "jungle", "kettle", "ladder",
    "lantern", "lemon", "marble", "meadow", "mirror", "needle", "orchard",
    "oyster", "pebble", "pillar", "pocket", "prairie", "ribbon", "river",
    "saddle", "shadow", "shelter", "signal", "silver", "spiral", "spring",
    "stone", "summit", "thunder", "timber", "tunnel", "valley", "velvet",
    "violet", "walnut", "whistle", "willow", "window",
]

FUNCTION_WORDS = ["the", "a", "and", "to", "of", "in", "on", "with", "for", "near"]


@dataclass(frozen=True)
class SalienceRule:
    min_overlap: float = 0.5
    salient_prob: float = 0.5
    topic_size: int = 8
    post_sentences: tuple = (2, 4)
    replies: tuple = (6, 10)
    reply_sentences: tuple = (1, 2)
    content_per_sentence: tuple = (3, 5)


def content_words(tokens):
    """Tokens that carry content: not function words, not punctuation."""
    return [t for t in tokens
            if t not in FUNCTION_WORDS and any(ch.isalnum() for ch in t)]


def overlap_fraction(sentence_tokens, post_content):
    """Fraction of the sentence's content words found in the post's."""
    content = content_words(sentence_tokens)
    if not content:
        return 0.0
    hits = sum(1 for t in content if t in post_content)
    return hits / len(content)


def _sentence(rng, words):
    """Interleave function words between content words; capitalize; end
    with a period (so the rule-based splitter sees clean boundaries)."""
    out = [words[0]]
    for w in words[1:]:
        if rng.random() < 0.5:
            out.append(rng.choice(FUNCTION_WORDS))
        out.append(w)
    text = " ".join(out) + "."
    return text[0].upper() + text[1:]


def _pick(rng, pool, count):
    if count <= len(pool):
        return rng.sample(pool, count)
    return [rng.choice(pool) for _ in range(count)]


def synth_threads(count, seed, rule=None):
    """Deterministic synthetic corpus of `count` threads."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rule = rule or SalienceRule()
    rng = random.Random(seed)
    threads = []
    for t in range(count):
        topic = rng.sample(CONTENT_WORDS, rule.topic_size)
        others = [w for w in CONTENT_WORDS if w not in topic]

        post_sents = []
        for _ in range(rng.randint(*rule.post_sentences)):
            c = rng.randint(*rule.content_per_sentence)
            post_sents.append(_sentence(rng, _pick(rng, topic, c)))
        post = " ".join(post_sents)
        post_content = set(content_words(post.lower().replace(".", " ").split()))

        comments = [post]
        labels = [[1] * len(post_sents)]
        summary_sents = list(post_sents)
        for _ in range(rng.randint(*rule.replies)):
            salient = rng.random() < rule.salient_prob
            sents = []
            for _ in range(rng.randint(*rule.reply_sentences)):
                c = rng.randint(*rule.content_per_sentence)
                if salient:
                    k = rng.randint(math.ceil(c * rule.min_overlap), c)
                    words = _pick(rng, sorted(post_content), k) + _pick(rng, others, c - k)
                    rng.shuffle(words)
                else:
                    words = _pick(rng, others, c)
                sents.append(_sentence(rng, words))
            comments.append(" ".join(sents))
            labels.append([1 if salient else 0] * len(sents))
            if salient:
                summary_sents.extend(sents)

        threads.append(RawThread(
            id=f"synth-{seed}-{t:04d}",
            comments=comments,
            labels=labels,
            summary=" ".join(summary_sents),
        ))
    return threads
