# SPDX-License-Identifier: MIT

"""Builds the judge, translator, teacher and student for a backend kind."""

from typing import Mapping, Optional

from fcsynth.configuration import Configuration
from fcsynth.llm.backend import ChatBackend, build_http_backend
from fcsynth.llm.judges import (
    LlmDependencyJudge,
    LlmNestedJudge,
    LlmTaxonomyJudge,
    LlmTranslationBackend,
)
from fcsynth.llm.mock import (
    HeuristicJudgeBackend,
    HintEchoBackend,
    MappingTaxonomyJudge,
    ReferenceStudentBackend,
    RuleDependencyJudge,
    RuleNestedJudge,
    TemplateTranslationBackend,
)
from fcsynth.llm.retry import configure_in_flight
from fcsynth.model.chat import ChatParams
from fcsynth.model.function_pool import FunctionPool
from fcsynth.model.pipeline import BackendKind
from fcsynth.service.dependency_graph import DependencyJudge
from fcsynth.service.function_pool import TaxonomyJudge
from fcsynth.service.node_ops import NestedJudge
from fcsynth.service.translation import TranslationBackend


class BackendFactory:
    def __init__(self, config: Configuration) -> None:
        self.config = config
        self._http: Optional[ChatBackend] = None

    @property
    def http(self) -> ChatBackend:
        if self._http is None:
            configure_in_flight(self.config["llm_max_in_flight"])
            self._http = build_http_backend(self.config)
        return self._http

    @property
    def params(self) -> ChatParams:
        return {
            "temperature": self.config["llm_temperature"],
            "max_tokens": self.config["llm_max_tokens"],
        }

    @property
    def retries(self) -> int:
        return self.config["llm_max_retries"]

    def taxonomy_judge(self, kind: BackendKind, pool: FunctionPool) -> TaxonomyJudge:
        if kind == "llm":
            return LlmTaxonomyJudge(self.http, self.params, self.retries)
        return MappingTaxonomyJudge(
            {sig["api_name"]: (sig["category"], sig["tool_class"]) for sig in pool}
        )

    def dependency_judge(self, kind: BackendKind) -> DependencyJudge:
        if kind == "llm":
            return LlmDependencyJudge(self.http, self.params, self.retries)
        return RuleDependencyJudge()

    def nested_judge(self, kind: BackendKind, pool: FunctionPool) -> NestedJudge:
        if kind == "llm":
            return LlmNestedJudge(self.http, pool, self.params, self.retries)
        return RuleNestedJudge(pool)

    def translator(self, kind: BackendKind) -> TranslationBackend:
        if kind == "llm":
            return LlmTranslationBackend(self.http, self.params, self.retries)
        return TemplateTranslationBackend()

    def teacher(self, kind: BackendKind, one_at_a_time: bool = False) -> ChatBackend:
        if kind == "llm":
            return self.http
        return HintEchoBackend(one_at_a_time)

    def student(
        self,
        kind: BackendKind,
        references: Mapping[str, str],
        error_rate: float = 0.3,
        one_at_a_time: bool = False,
    ) -> ChatBackend:
        if kind == "llm":
            return self.http
        return ReferenceStudentBackend(references, error_rate, one_at_a_time)

    def judge(self, kind: BackendKind) -> ChatBackend:
        if kind == "llm":
            return self.http
        return HeuristicJudgeBackend()
