"""Deterministic rule-based backend for offline runs and tests.

Implements every subroutine with small table-driven heuristics: a synonym
and gerund normalizer, a clause splitter with temporal reordering and
pronoun replacement, keyword action matching, mention-based argument
selection, a template verbalizer, and token-multiset paraphrase judgment.
The tables live in a bundled data file; ``map_overrides`` lets tests force
specific (mis)matches, e.g. an inexact mapping the paraphrase gate must
reject.

Identical prompt in, identical response out: the engine holds no state.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from typing import Any

_WORD_RE = re.compile(r"[a-zA-Z][a-zA-Z'-]*")
_TOKEN_RE = re.compile(r"[a-zA-Z0-9][a-zA-Z0-9'-]*")
_PRONOUNS = {"it", "them"}
_ORDINAL_RE = re.compile(r"^(?:first|then|next|finally|now|also|after that)[,\s]+", re.I)
_CAMEL_RE = re.compile(r"[a-z0-9]+|[A-Z][a-z0-9]*")
_PARTICLES = {"on", "off", "up", "down"}


def load_default_rules() -> dict[str, Any]:
    text = resources.files("tasktutor.data").joinpath("mock_rules.json").read_text()
    return json.loads(text)


def camel_words(name: str) -> list[str]:
    return [w.lower() for w in _CAMEL_RE.findall(name)]


def _base_class(ref: str) -> str:
    return ref.rstrip("0123456789")


class MockBackend:
    def __init__(
        self,
        rules: dict[str, Any] | None = None,
        map_overrides: dict[str, str | None] | None = None,
    ) -> None:
        self.rules = rules or load_default_rules()
        self.map_overrides = dict(self.rules.get("map_overrides", {}))
        if map_overrides:
            self.map_overrides.update(map_overrides)

    # -- shared normalization ------------------------------------------------

    def _canon_token(self, token: str) -> str:
        token = token.lower()
        token = self.rules["gerunds"].get(token, token)
        return self.rules["synonyms"].get(token, token)

    def _tokens(self, text: str) -> list[str]:
        return [self._canon_token(t) for t in _WORD_RE.findall(text)]

    def _apply_aliases(self, text: str) -> str:
        for phrase, target in sorted(
            self.rules["object_aliases"].items(), key=lambda kv: -len(kv[0])
        ):
            text = re.sub(rf"\b{re.escape(phrase)}\b", target, text)
        return text

    # -- subroutines -----------------------------------------------------------

    def complete(self, prompt: dict[str, Any]) -> str:
        payload = prompt["payload"]
        handler = getattr(self, f"_do_{prompt['subroutine']}")
        return json.dumps(handler(payload))

    def _do_segment(self, payload: dict[str, Any]) -> dict[str, Any]:
        utterance = payload["utterance"]
        nouns = set(self.rules["nouns"]) | set(payload.get("objects", []))
        locations = set(self.rules["location_nouns"])
        resolved = self._resolve_pronouns(utterance, nouns, locations)
        steps: list[str] = []
        for sentence in re.split(r"[.!?;]+", resolved):
            sentence = sentence.strip()
            if not sentence:
                continue
            sentence = _ORDINAL_RE.sub("", sentence)
            for clause in self._temporal_order(sentence):
                for part in re.split(r",?\s+and\s+|,\s+", clause):
                    part = part.strip(" ,")
                    if part:
                        steps.extend(self._expand_repetition(self._clean(part)))
        return {"steps": steps or [self._clean(utterance)]}

    def _resolve_pronouns(self, text: str, nouns: set[str], locations: set[str]) -> str:
        last_noun: str | None = None
        last_location: str | None = None

        def repl(match: re.Match[str]) -> str:
            nonlocal last_noun, last_location
            word = match.group(0)
            low = word.lower()
            if low in _PRONOUNS and last_noun:
                return f"the {last_noun}"
            if low == "there" and last_location:
                return f"the {last_location}"
            if low in nouns:
                last_noun = low
                if low in locations:
                    last_location = low
            return word

        return _WORD_RE.sub(repl, text)

    def _temporal_order(self, sentence: str) -> list[str]:
        after = re.split(r"\s+after\s+", sentence, maxsplit=1, flags=re.I)
        if len(after) == 2:
            return [after[1], after[0]]
        before = re.split(r"\s+before\s+", sentence, maxsplit=1, flags=re.I)
        if len(before) == 2:
            return [before[0], before[1]]
        return [sentence]

    def _clean(self, part: str) -> str:
        words = _TOKEN_RE.findall(part)
        out = []
        for word in words:
            low = word.lower()
            out.append(self.rules["gerunds"].get(low, low))
        return " ".join(out)

    def _expand_repetition(self, segment: str) -> list[str]:
        numbers = self.rules["number_words"]
        count = 1
        match = re.search(r"\b([a-z0-9]+)\s+times\b", segment)
        if match:
            word = match.group(1)
            if word.isdigit():
                count = int(word)
            elif word in numbers:
                count = numbers[word]
            else:
                match = None
        if match:
            segment = (segment[: match.start()] + segment[match.end() :]).strip()
        else:
            for word in ("twice", "thrice"):
                if re.search(rf"\b{word}\b", segment):
                    count = numbers.get(word, 2)
                    segment = re.sub(rf"\s*\b{word}\b", "", segment).strip()
                    break
        return [segment] * max(count, 1)

    def _do_map(self, payload: dict[str, Any]) -> dict[str, Any]:
        segment = payload["segment"].strip().lower()
        if segment in self.map_overrides:
            return {"action": self.map_overrides[segment]}
        tokens = self._tokens(self._apply_aliases(segment))
        best: tuple[int, str] | None = None
        for candidate in payload["candidates"]:
            words = [self._canon_token(w) for w in camel_words(candidate)]
            if self._subsequence(words, tokens):
                if best is None or len(words) > best[0]:
                    best = (len(words), candidate)
        return {"action": best[1] if best else None}

    @staticmethod
    def _subsequence(needles: list[str], haystack: list[str]) -> bool:
        position = 0
        for needle in needles:
            try:
                position = haystack.index(needle, position) + 1
            except ValueError:
                return False
        return True

    def _do_ground(self, payload: dict[str, Any]) -> dict[str, Any]:
        segment = self._apply_aliases(payload["segment"].lower())
        objects: list[str] = payload["objects"]
        mentions: list[tuple[int, str]] = []
        consumed: list[tuple[int, int]] = []

        def scan(phrase: str, targets: list[str]) -> None:
            for match in re.finditer(rf"\b{re.escape(phrase)}\b", segment):
                span = (match.start(), match.end())
                if any(s < span[1] and span[0] < e for s, e in consumed):
                    continue
                consumed.append(span)
                mentions.extend((match.start(), t) for t in targets)

        for phrase, targets in sorted(
            self.rules["descriptors"].items(), key=lambda kv: -len(kv[0])
        ):
            real = [t for t in targets if t in objects]
            if real:
                scan(phrase, real)
        for obj in sorted(objects, key=len, reverse=True):
            scan(obj, [obj])
        mentions.sort(key=lambda m: m[0])
        available = [ref for _, ref in mentions]
        args: list[str] = []
        for param in payload["params"]:
            chosen = None
            for ref in available:
                if _base_class(ref) == _base_class(param):
                    chosen = ref
                    break
            if chosen is None and available:
                chosen = available[0]
            if chosen is None:
                break
            available.remove(chosen)
            args.append(chosen)
        return {"args": args}

    def _do_verbalize(self, payload: dict[str, Any]) -> dict[str, Any]:
        action = payload["action"]
        args = payload["args"]
        template = self.rules["verbalize_templates"].get(action)
        if template:
            return {"sentence": template.format(*args)}
        words = " ".join(camel_words(action))
        sentence = words + "".join(f" the {arg}" for arg in args)
        return {"sentence": sentence}

    def _normalize_sentence(self, text: str) -> list[str]:
        stop = set(self.rules["stopwords"])
        tokens = self._tokens(self._apply_aliases(text.lower()))
        return sorted(t for t in tokens if t not in stop)

    def _do_paraphrase(self, payload: dict[str, Any]) -> dict[str, Any]:
        return {
            "match": self._normalize_sentence(payload["a"])
            == self._normalize_sentence(payload["b"])
        }

    def _do_name(self, payload: dict[str, Any]) -> dict[str, Any]:
        source = payload["source_text"].strip().lower()
        table = self.rules["name_table"]
        if source in table:
            return {"name": table[source]}
        words = _WORD_RE.findall(source)
        if not words:
            return {"name": "task"}
        verb = words[0].lower()
        verb = self.rules["gerunds"].get(verb, verb)
        verb = self.rules["name_verbs"].get(verb, verb)
        name = verb
        if len(words) > 1 and words[-1].lower() in _PARTICLES:
            particle = words[-1].lower()
            name = verb + particle[0].upper() + particle[1:]
        return {"name": name}

    def _do_generalize(self, payload: dict[str, Any]) -> dict[str, Any]:
        source = payload["source_text"].strip().lower()
        used: list[str] = payload["used_args"]
        table = self.rules["generalize_table"]
        if source in table:
            allowed = set(table[source])
            return {"generalize": [a for a in used if a in allowed]}
        tokens = set(self._tokens(self._apply_aliases(source)))
        return {"generalize": [a for a in used if _base_class(a) in tokens]}
