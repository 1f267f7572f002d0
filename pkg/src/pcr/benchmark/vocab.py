"""Templated vocabulary for the six benchmark domains.

Each domain has three clusters (independent sub-systems that form weakly
linked regions of the graph) and five topics whose keywords recur in every
cluster. Queries mention topic keywords only, so lexically and semantically
similar nodes exist both inside and outside the anchor's reachable region.
"""

from typing import Dict, List, NamedTuple, Tuple


class DomainVocab(NamedTuple):
    prefix: str
    clusters: Tuple[Tuple[str, str], ...]  # (title, overview words)
    topics: Tuple[Tuple[str, Tuple[str, ...]], ...]  # (topic name, keywords)
    facets: Tuple[str, ...]
    relations: Tuple[str, ...]


DOMAINS: Dict[str, DomainVocab] = {
    "tech": DomainVocab(
        "t",
        (
            ("Payments platform", "billing ledger checkout merchants"),
            ("Search engine", "crawler ranking index relevance"),
            ("Analytics pipeline", "warehouse batch reporting etl"),
        ),
        (
            ("caching", ("cache", "redis", "eviction", "ttl")),
            ("storage", ("database", "replication", "sharding", "postgres")),
            ("security", ("authentication", "encryption", "tokens", "oauth")),
            ("monitoring", ("metrics", "alerting", "dashboards", "latency")),
            ("deployment", ("containers", "rollout", "kubernetes", "canary")),
        ),
        ("design notes", "failure modes", "capacity planning", "runbook", "tradeoffs", "migration plan"),
        ("depends_on", "uses", "implements", "configures"),
    ),
    "legal": DomainVocab(
        "l",
        (
            ("Contract law", "agreements offer acceptance consideration"),
            ("Privacy regulation", "gdpr personal data controllers"),
            ("Employment law", "workers wages dismissal unions"),
        ),
        (
            ("liability", ("liability", "damages", "negligence", "indemnity")),
            ("compliance", ("compliance", "audit", "obligations", "reporting")),
            ("disputes", ("arbitration", "litigation", "court", "mediation")),
            ("consent", ("consent", "notice", "disclosure", "waiver")),
            ("termination", ("termination", "breach", "remedy", "penalties")),
        ),
        ("statutory basis", "case precedent", "exceptions", "enforcement", "interpretation", "checklist"),
        ("cites", "governs", "amends", "applies_to"),
    ),
    "bio": DomainVocab(
        "b",
        (
            ("Cell signaling", "ligands cascades second messengers"),
            ("Gene regulation", "chromatin operons silencing"),
            ("Metabolic pathways", "glycolysis flux intermediates"),
        ),
        (
            ("proteins", ("protein", "kinase", "phosphorylation", "folding")),
            ("transcription", ("transcription", "promoter", "enhancer", "polymerase")),
            ("enzymes", ("enzyme", "catalysis", "substrate", "inhibitor")),
            ("membranes", ("membrane", "receptor", "channel", "transport")),
            ("energy", ("atp", "mitochondria", "respiration", "oxidation")),
        ),
        ("mechanism", "experimental evidence", "regulation", "disease link", "model organism", "open problems"),
        ("activates", "inhibits", "part_of", "regulates"),
    ),
    "microservices": DomainVocab(
        "ms",
        (
            ("Order service", "orders cart fulfillment shipping"),
            ("Inventory service", "stock warehouse reservations sku"),
            ("User service", "profiles accounts sessions signup"),
        ),
        (
            ("api", ("api", "endpoint", "gateway", "versioning")),
            ("messaging", ("queue", "events", "broker", "kafka")),
            ("resilience", ("retry", "circuit", "breaker", "timeout")),
            ("persistence", ("schema", "migration", "datastore", "transactions")),
            ("observability", ("tracing", "logs", "spans", "correlation")),
        ),
        ("contract", "sequence diagram", "ownership", "sla", "incident review", "rollout checklist"),
        ("calls", "publishes_to", "subscribes_to", "owns"),
    ),
    "citations": DomainVocab(
        "c",
        (
            ("Transformer models", "language pretraining tokens scaling"),
            ("Graph learning", "message passing nodes graphs"),
            ("Reinforcement learning", "agents rewards policies environments"),
        ),
        (
            ("attention", ("attention", "heads", "context", "sparse")),
            ("benchmarks", ("benchmark", "dataset", "evaluation", "leaderboard")),
            ("optimization", ("gradient", "optimizer", "convergence", "learning rate")),
            ("theory", ("theorem", "bound", "proof", "generalization")),
            ("applications", ("application", "deployment", "industry", "case study")),
        ),
        ("survey", "follow up study", "replication", "critique", "extension", "ablation"),
        ("cites", "extends", "refutes", "builds_on"),
    ),
    "medical": DomainVocab(
        "md",
        (
            ("Cardiology", "heart arrhythmia coronary"),
            ("Oncology", "tumor cancer chemotherapy"),
            ("Endocrinology", "hormones thyroid diabetes"),
        ),
        (
            ("diagnosis", ("diagnosis", "imaging", "screening", "biomarkers")),
            ("medication", ("dosage", "drug", "prescription", "interactions")),
            ("surgery", ("surgical", "procedure", "recovery", "anesthesia")),
            ("risk", ("risk", "factors", "prevention", "lifestyle")),
            ("monitoring", ("vitals", "monitoring", "followup", "telemetry")),
        ),
        ("guideline", "clinical trial", "contraindications", "patient education", "protocol", "outcomes"),
        ("treats", "indicates", "complicates", "follows"),
    ),
}

DOMAIN_ORDER: List[str] = ["tech", "legal", "bio", "microservices", "citations", "medical"]

QUERY_TEMPLATES = (
    "How does {a} relate to {b}?",
    "What is known about {a} and {b}?",
    "Explain {a} with respect to {b}",
    "Guidance on {a} and {b}",
    "Which concerns involve {a} or {b}?",
)
