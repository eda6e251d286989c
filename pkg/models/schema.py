"""
Pydantic models for configuration, manifests, store records and metrics.
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

Phase = Literal["exploration", "training", "reduction"]


class GenLimits(BaseModel):
    """Per-(sub)program limits for generation and evaluation."""
    model_config = ConfigDict(extra="forbid")

    max_nodes: int = Field(default=64, ge=1, description="Maximum nodes per (sub)program")
    max_depth: int = Field(default=8, ge=1, description="Maximum depth per (sub)program")
    max_nesting: int = Field(default=2, ge=0, description="Maximum nesting of higher-order operations")
    step_budget: int = Field(default=1_000_000, ge=1, description="Primitive evaluation steps per run")
    backtrack_budget: int = Field(default=32, ge=0, description="Backtracks allowed per generated program")
    nonterminal_coef: float = Field(
        default=0.1, gt=0.0,
        description="Weight multiplier for operations relative to leaves; keeps sampled trees small",
    )


class LoopConfig(BaseModel):
    """Every knob of the learning loop."""
    model_config = ConfigDict(extra="forbid")

    exploration_min_tasks: int = Field(default=8192, ge=0, description="New tasks S must gain per exploration")
    exploration_min_unique_solutions: int = Field(default=32, ge=0, description="New distinct programs per exploration")
    reduction_categories: int = Field(default=64, ge=1, description="Categories drawn per reduction (n)")
    tasks_per_category: int = Field(default=32, ge=1, description="Tasks drawn per category (k)")
    solve_threshold: float = Field(default=0.30, ge=0.0, le=1.0, description="Mean category solve rate to leave training")
    stagnation_window: int = Field(default=10, ge=1, description="Reductions without improvement that count as stagnation")
    attempts_per_task: int = Field(default=8, ge=1, description="Generated programs per task when evaluating")
    rng_seed: int = Field(default=0, description="Seed for every random choice of a run")
    generation: GenLimits = Field(default_factory=GenLimits, description="Generator limits")
    training_subset: int = Field(default=4096, ge=0, description="Links drawn from S per training phase")
    counting_alpha: float = Field(default=1.0, gt=0.0, description="Smoothing of the counting policy")
    max_exploration_iterations: int = Field(default=200_000, ge=1, description="Exploration iteration cap")
    frozen_synth_size: int = Field(default=2000, ge=0, description="Size of the frozen synthetic collection")
    store_sample_size: int = Field(default=256, ge=0, description="Links sampled for the post-reduction solve rate")
    jobs: int = Field(default=1, ge=1, description="Worker processes")


class IngestFailure(BaseModel):
    filename: str = Field(description="File that failed to parse")
    message: str = Field(description="Why it failed")


class IngestManifest(BaseModel):
    """Outcome of reading an ARC directory."""
    root: str = Field(description="Directory that was read")
    loaded: List[str] = Field(default_factory=list, description="Task names loaded, in order")
    failures: List[IngestFailure] = Field(default_factory=list, description="Files skipped")

    @property
    def count(self) -> int:
        return len(self.loaded)


class StoreRecord(BaseModel):
    """One line of the store log."""
    kind: Literal["task", "program", "link", "learned", "unlearned", "pool"] = Field(description="Record kind")
    digest: str = Field(description="Task digest, program digest, or task:program for links")
    payload: Dict[str, Any] = Field(default_factory=dict, description="Kind-specific content")


class CountEntry(BaseModel):
    parent: str
    child_index: int
    type_key: str
    name: str
    count: float


class PolicySnapshot(BaseModel):
    """Serialized policy state."""
    version: int = Field(default=1, description="Snapshot format version")
    kind: Literal["uniform", "counting"] = Field(description="Policy implementation")
    alpha: float = Field(default=1.0, description="Smoothing for counting policies")
    counts: List[CountEntry] = Field(default_factory=list, description="Observed decision counts")


class ReductionRecord(BaseModel):
    cycle: int = Field(description="Cycle the reduction ran in")
    category_averages: Dict[str, float] = Field(description="Solve average per category (program digest)")
    mean: float = Field(description="Mean of the category averages")
    learned: int = Field(description="Tasks marked learned and removed from S")
    unlearned: int = Field(description="Tasks that failed and were (re)added to S")
    sample_rate: Optional[float] = Field(default=None, description="Solve rate on a sample of S afterwards")
    next_phase: Phase = Field(description="Phase chosen after this reduction")


class CycleRecord(BaseModel):
    """One row of the per-cycle metric table."""
    cycle: int
    rate_synth: float = Field(ge=0.0, le=1.0)
    rate_arc: float = Field(ge=0.0, le=1.0)
    store_links: int = Field(description="Active links in S")
    pool_size: int = Field(description="Tasks in L")


class Metrics(BaseModel):
    rate_synth: float = Field(default=0.0, ge=0.0, le=1.0)
    rate_arc: float = Field(default=0.0, ge=0.0, le=1.0)
    history: List[CycleRecord] = Field(default_factory=list, description="Per-cycle rates")
    reductions: List[ReductionRecord] = Field(default_factory=list, description="Per-reduction outcomes")
    cross_table: List[List[Optional[float]]] = Field(
        default_factory=list, description="Rows: policy snapshot cycle; columns: collection cycle; None for an empty collection"
    )
    cross_table_rows: List[int] = Field(default_factory=list, description="Snapshot cycle of each row")
    cross_table_columns: List[int] = Field(default_factory=list, description="Collection cycle of each column")


class RunManifest(BaseModel):
    """Written once per run directory."""
    config: LoopConfig
    seed: int
    corpus_digest: str = Field(description="Digest over all ingested task digests")
    task_count: int
    eval_task_count: int = 0
    created: str = Field(description="ISO timestamp")


class Transition(BaseModel):
    cycle: int
    source: Phase
    target: Phase


class CheckpointState(BaseModel):
    """Everything needed to resume a run after the last completed cycle."""
    cycle: int = Field(description="Cycles completed")
    phase: Phase = Field(description="Phase to run next")
    log_offset: int = Field(description="Store log size in bytes at checkpoint time")
    rng_state: List[Any] = Field(description="random.Random.getstate(), JSON-encoded")
    transitions: List[Transition] = Field(default_factory=list)
    metrics: Metrics = Field(default_factory=Metrics)
    best_window_mean: Optional[float] = None
    stagnant_reductions: int = 0
    collections: Dict[str, List[str]] = Field(
        default_factory=dict, description="Cycle number -> task digests first added to S in that cycle"
    )
    frozen_synth: List[str] = Field(default_factory=list, description="Digests of the frozen synthetic collection")


class AuditReport(BaseModel):
    links_checked: int = 0
    inconsistent: List[str] = Field(default_factory=list, description="task:program links whose program fails its task")
    duplicate_links: int = 0
    learned_without_links: List[str] = Field(default_factory=list, description="Tasks marked learned that never had a link")
    unlearned_missing: List[str] = Field(default_factory=list, description="Tasks marked not learned yet absent from S")

    @property
    def ok(self) -> bool:
        return not (self.inconsistent or self.duplicate_links or self.learned_without_links or self.unlearned_missing)
