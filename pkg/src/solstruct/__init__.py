"""Structured synthesis of harder math word problems.

Parse annotated solution programs, extract their dependency graphs, apply
structural interventions with executable ground truth, quality-check the
results, and score model responses on the product.
"""

from .errors import SolstructError, UndefinedNameError
from .solgrammar import (
    AnnotatedProgram,
    ProgramSyntaxError,
    Statement,
    classify_subset,
    count_steps,
    parse_program,
    render_program,
)
from .graphx import ComputeGraph, build_graph, candidate_targets, descendants
from .evalcore import (
    EvaluationError,
    Trace,
    check_annotations,
    evaluate,
)
from .intervene import (
    InterventionRecord,
    MappingSpec,
    extend_structure,
    perturb_leaf,
    splice_agent_extension,
)
from .qc import diff_filter, local_check, parse_eval, retain
from .agentio import AgentConfig, MockAgent, complete, parse_generation, render_prompt
from .bench import answers_equal, extract_boxed, normalize_answer, score
from .pipeline import GenerationRecord, RunConfig, SeedProblem, load_dataset, run_full

__version__ = "0.1.0"

__all__ = [
    "AgentConfig",
    "AnnotatedProgram",
    "ComputeGraph",
    "EvaluationError",
    "GenerationRecord",
    "InterventionRecord",
    "MappingSpec",
    "MockAgent",
    "ProgramSyntaxError",
    "RunConfig",
    "SeedProblem",
    "SolstructError",
    "Statement",
    "Trace",
    "UndefinedNameError",
    "answers_equal",
    "build_graph",
    "candidate_targets",
    "check_annotations",
    "classify_subset",
    "complete",
    "count_steps",
    "descendants",
    "diff_filter",
    "evaluate",
    "extend_structure",
    "extract_boxed",
    "load_dataset",
    "local_check",
    "normalize_answer",
    "parse_eval",
    "parse_generation",
    "parse_program",
    "perturb_leaf",
    "render_program",
    "render_prompt",
    "retain",
    "run_full",
    "score",
    "splice_agent_extension",
]
