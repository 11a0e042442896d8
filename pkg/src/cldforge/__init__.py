"""cldforge: causal loop diagrams from dynamic hypotheses.

Turn a textual dynamic hypothesis into a polarity-annotated causal loop
diagram with an LLM (or a deterministic mock), enumerate and classify its
feedback loops, and score generated diagrams against expert ground truth.
"""

from .model import (
    CausalLoopDiagram,
    FeedbackLoop,
    Link,
    LoopKind,
    Polarity,
    VariableName,
    build_diagram,
    classify_loop,
    enumerate_loops,
    exogenous_variables,
    link,
    normalize_name,
)
from .dotio import (
    DigraphSyntaxError,
    NoDigraphFound,
    ParseDiagnostic,
    ParseMode,
    Severity,
    emit_digraph,
    emit_render_dot,
    extract_digraph_block,
    parse_digraph,
)
from .corpus import Corpus, CorpusItem, bundled_goldens, load_corpus
from .prompting import (
    Exemplar,
    PromptBundle,
    StageRequest,
    Strategy,
    build_prompt,
    guided_instruction,
    parse_variable_list,
    select_exemplars,
    two_stage_instructions,
)
from .client import (
    GenerationRecord,
    HttpProvider,
    MockProvider,
    ProviderConfig,
    batch_generate,
    complete,
    run_pipeline,
)
from .evaluate import (
    AggregateReport,
    EvalReport,
    NodeMatching,
    batch_report,
    evaluate,
    match_nodes,
    name_similarity,
)

__version__ = "0.1.0"

__all__ = [
    "CausalLoopDiagram", "FeedbackLoop", "Link", "LoopKind", "Polarity",
    "VariableName", "build_diagram", "classify_loop", "enumerate_loops",
    "exogenous_variables", "link", "normalize_name",
    "DigraphSyntaxError", "NoDigraphFound", "ParseDiagnostic", "ParseMode",
    "Severity", "emit_digraph", "emit_render_dot", "extract_digraph_block",
    "parse_digraph",
    "Corpus", "CorpusItem", "bundled_goldens", "load_corpus",
    "Exemplar", "PromptBundle", "StageRequest", "Strategy", "build_prompt",
    "guided_instruction", "parse_variable_list", "select_exemplars",
    "two_stage_instructions",
    "GenerationRecord", "HttpProvider", "MockProvider", "ProviderConfig",
    "batch_generate", "complete", "run_pipeline",
    "AggregateReport", "EvalReport", "NodeMatching", "batch_report",
    "evaluate", "match_nodes", "name_similarity",
    "__version__",
]
