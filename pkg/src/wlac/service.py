"""HTTP API for translation, word suggestions, and completion.

Endpoints (JSON over HTTP/1.1, UTF-8):

* ``POST /translate``  - deterministic sentence translation.
* ``POST /suggest``    - diverse word suggestions after an optional prefix,
  each paired with the auto-completion of the rest of the sentence.
* ``POST /complete``   - the word-level auto-completion method.
* ``GET  /health``     - loaded language pairs.

Responses carry a server-assigned id that strictly increases within one
process.  Malformed bodies return 400; unknown language pairs 404; failed
language auto-detection 422.  The historical misspelled suggestion key
("compelection") can additionally be emitted for byte compatibility with
older clients via ``legacy_keys=True``.
"""

from __future__ import annotations

import itertools
import threading
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, Iterable, List, Optional, Tuple

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .completion import complete, match_word, MatchPolicy, script_for_lang, TargetScript
from .core import DecodeConfig, WlacInstance, is_han_lang
from .decoder import RngState, decode_alternatives
from .evalkit import ResultRow  # noqa: F401  (re-exported for API consumers)
from .model import TranslationModel
from .tokenization import detokenize, is_cjk_lang, word_tokenize
from .translit import PinyinTable, load_default_table


def load_stopwords(lang: str) -> frozenset:
    path = resources.files("wlac").joinpath(f"data/stopwords/{lang}.txt")
    try:
        with resources.as_file(path) as real_path:
            with open(real_path, encoding="utf-8") as fh:
                return frozenset(line.strip() for line in fh if line.strip())
    except FileNotFoundError:
        return frozenset()


def _han_ratio(text: str) -> float:
    letters = [ch for ch in text if ch.isalpha()]
    if not letters:
        return 0.0
    han = sum(1 for ch in letters
              if unicodedata.name(ch, "").startswith("CJK UNIFIED IDEOGRAPH"))
    return han / len(letters)


@dataclass
class ServiceConfig:
    suggest_config: DecodeConfig = field(default_factory=lambda: DecodeConfig(
        sampling_topk=10, num_hypotheses=10, max_decode_len=64))
    complete_config: DecodeConfig = field(default_factory=lambda: DecodeConfig(
        sampling_topk=10, num_hypotheses=10, max_runs=5, max_decode_len=64))
    translate_max_len: int = 128
    seed: int = 0
    default_source: str = "en"
    legacy_keys: bool = False


class ModelRegistry:
    """Loaded models keyed by (source, target) language pair."""

    def __init__(self, pinyin: Optional[PinyinTable] = None,
                 lexicon: Optional[Iterable[str]] = None):
        self._models: Dict[Tuple[str, str], TranslationModel] = {}
        self.pinyin = pinyin
        self.lexicon = frozenset(lexicon) if lexicon is not None else None
        self._stopwords: Dict[str, frozenset] = {}

    def add(self, src_lang: str, tgt_lang: str, model: TranslationModel) -> None:
        self._models[(src_lang, tgt_lang)] = model
        if src_lang not in self._stopwords and not is_han_lang(src_lang):
            self._stopwords[src_lang] = load_stopwords(src_lang)
        if is_han_lang(src_lang) or is_han_lang(tgt_lang):
            if self.pinyin is None:
                self.pinyin = load_default_table()

    def get(self, src_lang: str, tgt_lang: str) -> Optional[TranslationModel]:
        return self._models.get((src_lang, tgt_lang))

    @property
    def pairs(self) -> List[str]:
        return [f"{s}-{t}" for s, t in sorted(self._models)]

    def source_languages(self) -> List[str]:
        return sorted({s for s, _ in self._models})

    def stopwords(self, lang: str) -> frozenset:
        return self._stopwords.get(lang, frozenset())


def detect_language(text: str, registry: ModelRegistry,
                    default_source: str) -> str:
    """Heuristic source-language detection over the loaded languages.

    Mostly-Han text is "zh"; otherwise the loaded Latin language with the
    largest stopword overlap wins, ties going to the configured default.
    """
    if not text.strip():
        raise ValueError("cannot detect the language of empty text")
    if _han_ratio(text) >= 0.3:
        return "zh"
    tokens = [w.lower() for w in text.split()]
    best_lang = None
    best_overlap = 0
    for lang in registry.source_languages():
        if is_han_lang(lang):
            continue
        overlap = sum(1 for tok in tokens if tok in registry.stopwords(lang))
        if overlap > best_overlap or (overlap == best_overlap and overlap > 0
                                      and lang == default_source):
            best_lang = lang
            best_overlap = overlap
    if best_lang is None or best_overlap == 0:
        raise ValueError(f"no loaded language matches the text {text[:40]!r}")
    return best_lang


class TranslateRequest(BaseModel):
    sentences: List[str] = Field(min_length=1)
    source_language: str = "auto"
    target_language: str


class SuggestRequest(BaseModel):
    sentence: str = Field(min_length=1)
    prefix: str = ""
    source_language: str = "auto"
    target_language: str


class CompleteRequest(BaseModel):
    source: str = Field(min_length=1)
    left_context: str = ""
    right_context: str = ""
    typed: str
    source_language: str = "auto"
    target_language: str


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _hypothesis_text(model: TranslationModel, tokens, tgt_lang: str,
                     detok: bool = True) -> str:
    text = model.vocab.decode(tokens)
    if detok:
        lang = "zh" if is_han_lang(tgt_lang) else "en"
        text = detokenize(text.split(), lang)
    return text


def create_app(registry: ModelRegistry,
               config: Optional[ServiceConfig] = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="wlac", version="0.1.0",
                  description="Translation, auto-suggestion and "
                              "word-level auto-completion API")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    ids = itertools.count(1)
    id_lock = threading.Lock()

    def next_id() -> int:
        with id_lock:
            return next(ids)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "error": {"code": "malformed_request", "message": str(exc.errors())}})

    @app.exception_handler(ApiError)
    async def api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={
            "error": {"code": exc.code, "message": exc.message}})

    def resolve(source_language: str, target_language: str,
                text: str) -> Tuple[str, TranslationModel]:
        if source_language == "auto":
            try:
                source_language = detect_language(text, registry, config.default_source)
            except ValueError as exc:
                raise ApiError(422, "language_detection_failed", str(exc))
        model = registry.get(source_language, target_language)
        if model is None:
            raise ApiError(404, "unknown_language_pair",
                           f"no model loaded for {source_language}-{target_language}")
        return source_language, model

    @app.get("/health")
    async def health():
        return JSONResponse(content={"status": "ok", "language_pairs": registry.pairs})

    @app.post("/translate")
    async def translate(request: TranslateRequest):
        if any(not s.strip() for s in request.sentences):
            raise ApiError(400, "empty_sentence", "sentences must be non-empty")
        source_lang, model = resolve(request.source_language,
                                     request.target_language,
                                     " ".join(request.sentences))
        translate_config = DecodeConfig(num_hypotheses=1, sampling_topk=0,
                                        max_decode_len=config.translate_max_len)
        rng = RngState.derive(config.seed, "translate")  # unused: deterministic
        translations = []
        for sentence in request.sentences:
            source_tokens = model.encode_source(sentence)
            hyp = decode_alternatives(model, source_tokens, [],
                                      translate_config, rng)[0]
            translations.append(_hypothesis_text(model, hyp.tokens,
                                                 request.target_language))
        return JSONResponse(content={
            "id": next_id(),
            "source_lang": source_lang,
            "target_lang": request.target_language,
            "translations": translations,
        })

    @app.post("/suggest")
    async def suggest(request: SuggestRequest):
        source_lang, model = resolve(request.source_language,
                                     request.target_language, request.sentence)
        request_id = next_id()
        rng = RngState.derive(config.seed, "suggest", request_id)
        source_tokens = model.encode_source(request.sentence)
        prefix_tokens = model.encode_target(request.prefix.strip())
        hypotheses = decode_alternatives(model, source_tokens, prefix_tokens,
                                         config.suggest_config, rng)
        lang = "zh" if is_han_lang(request.target_language) else "en"
        best: Dict[str, Tuple[float, str, str]] = {}
        order: List[str] = []
        for hyp in hypotheses:
            text = _hypothesis_text(model, hyp.tokens, request.target_language)
            words = [w for w in word_tokenize(text, lang, registry.lexicon)
                     if w.strip()]
            if not words:
                continue
            suggestion = words[0]
            cut = text.find(suggestion) + len(suggestion)
            completion = text[cut:].strip()
            if suggestion not in best:
                order.append(suggestion)
                best[suggestion] = (hyp.score, suggestion, completion)
            elif hyp.score > best[suggestion][0]:
                best[suggestion] = (hyp.score, suggestion, completion)
        entries = []
        for suggestion in order:
            _, word, completion = best[suggestion]
            entry = {"suggestion": word, "completion": completion}
            if config.legacy_keys:
                entry["compelection"] = completion
            entries.append(entry)
        return JSONResponse(content={
            "id": request_id,
            "source_lang": source_lang,
            "target_lang": request.target_language,
            "result": {"translations": entries},
        })

    @app.post("/complete")
    async def complete_word(request: CompleteRequest):
        if not request.typed or any(ch.isspace() for ch in request.typed):
            raise ApiError(400, "invalid_typed",
                           "typed must be non-empty and contain no whitespace")
        source_lang, model = resolve(request.source_language,
                                     request.target_language, request.source)
        request_id = next_id()
        instance = WlacInstance(
            id=str(request_id), source=request.source,
            left_context=request.left_context, right_context=request.right_context,
            typed=request.typed, src_lang=source_lang,
            tgt_lang=request.target_language)
        rng = RngState.derive(config.seed, "complete", request_id)
        prediction = complete(model, instance, config.complete_config, rng,
                              pinyin=registry.pinyin, lexicon=registry.lexicon)
        if prediction is None:
            runs = 1 if config.complete_config.sampling_topk == 0 \
                else config.complete_config.max_runs
            payload = {"id": request_id, "word": None, "runs_used": runs}
        else:
            payload = {"id": request_id, "word": prediction.word,
                       "runs_used": prediction.runs_used}
        return JSONResponse(content=payload)

    return app
