"""Open-domain event extraction over daily news clusters.

Generative story, per cluster: a latent type vector t ~ Normal(alpha);
each entity mention draws a slot s ~ Multinomial(softmax(MLP(t; theta))),
then its head word h ~ Multinomial(lambda_s), feature vector
f ~ Normal(beta_s), and redundancy ratio r ~ Normal(gamma_s).

Training is stochastic variational inference: an encoder MLP over the
mean entity feature vector emits a diagonal Gaussian posterior for t,
the slot variable is marginalized out exactly (logsumexp over K), and
the reparameterized single-sample ELBO is climbed with Adam using
analytic gradients. Slot assignment picks argmax_s of the product
p(s|t) * p(h|s) * p(f|s) in log space.

Assembly keeps verb triggers, clausal-dependency triggers, and nouns
with eventive supersenses, attaches co-sentence entity mentions as
role-tagged arguments, ranks candidates by summed argument slot
likelihood, and emits a fixed-shape record of five events.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import modeldoc
from .embeddings import EmbeddingTable, load_embeddings  # noqa: F401  (re-export)
from .errors import AlignmentError, InsufficientDataError, OptimizationError
from .neural import MlpHead, adam_step, init_adam, init_mlp, mlp_backward, mlp_forward

TYPE_DIM = 100
ARG_DIM = 200
MAX_EVENTS = 5
MAX_EVENT_TOKENS = 20
OOV_TOKEN = "<oov>"

TRIGGER_DEPRELS = frozenset({"advcl", "ccomp", "rcmod", "acl:relcl", "xcomp"})
EVENT_SUPERSENSES = frozenset(
    {"noun.act", "noun.phenomenon", "noun.event", "noun.attribute"}
)
_PHRASE_DEPRELS = frozenset({"amod", "compound", "flat"})
_NOUN_UPOS = frozenset({"NOUN", "PROPN"})


@dataclass(frozen=True)
class Entity:
    """One entity mention inside a cluster."""

    head: str
    item_id: str
    sent_id: str
    token_index: int
    feature: np.ndarray
    redundancy: float

    def __post_init__(self):
        if not 0.0 <= self.redundancy <= 1.0:
            raise ValueError("redundancy ratio must lie in [0, 1]")
        if not np.all(np.isfinite(self.feature)):
            raise ValueError("entity feature vector must be finite")


@dataclass(frozen=True)
class NewsItem:
    item_id: str
    headline: str = ""
    body: str = ""
    source: str = ""


@dataclass
class NewsCluster:
    date: str
    items: list
    entities: list
    documents: list = None

    def __post_init__(self):
        if not self.items:
            raise ValueError("cluster must contain at least one news item")
        ids = {item.item_id for item in self.items}
        for ent in self.entities:
            if ent.item_id not in ids:
                raise ValueError(
                    f"entity head {ent.head!r} references unknown item {ent.item_id!r}"
                )


@dataclass(frozen=True)
class EventTypeVector:
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (TYPE_DIM,):
            raise ValueError(f"type vector must have dimension {TYPE_DIM}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("type vector must be finite")
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class AssembledEvent:
    trigger: str
    arguments: tuple  # of (slot, phrase) pairs
    tokens: tuple

    def to_dict(self) -> dict:
        return {
            "trigger": self.trigger,
            "arguments": [{"role": int(s), "text": p} for s, p in self.arguments],
            "tokens": list(self.tokens),
        }

    @classmethod
    def from_dict(cls, obj) -> "AssembledEvent":
        return cls(
            trigger=obj["trigger"],
            arguments=tuple((int(a["role"]), a["text"]) for a in obj["arguments"]),
            tokens=tuple(obj["tokens"]),
        )


_PAD_EVENT = AssembledEvent(trigger=OOV_TOKEN, arguments=(), tokens=(OOV_TOKEN,))


@dataclass
class EventRecord:
    type_vec: EventTypeVector
    events: list
    arg_embedding: np.ndarray

    def __post_init__(self):
        if len(self.events) != MAX_EVENTS:
            raise ValueError(f"record must carry exactly {MAX_EVENTS} events")
        for ev in self.events:
            if len(ev.tokens) > MAX_EVENT_TOKENS:
                raise ValueError(f"event exceeds {MAX_EVENT_TOKENS} tokens")
        arr = np.asarray(self.arg_embedding, dtype=float)
        if arr.shape != (ARG_DIM,):
            raise ValueError(f"argument embedding must have dimension {ARG_DIM}")
        self.arg_embedding = arr

    def to_dict(self) -> dict:
        return {
            "type_vec": self.type_vec.values.tolist(),
            "events": [ev.to_dict() for ev in self.events],
            "arg_embedding": self.arg_embedding.tolist(),
        }

    @classmethod
    def from_dict(cls, obj) -> "EventRecord":
        return cls(
            type_vec=EventTypeVector(np.asarray(obj["type_vec"], dtype=float)),
            events=[AssembledEvent.from_dict(e) for e in obj["events"]],
            arg_embedding=np.asarray(obj["arg_embedding"], dtype=float),
        )


def neutral_record() -> EventRecord:
    """Fixed-shape record for days with no news."""
    return EventRecord(
        type_vec=EventTypeVector(np.zeros(TYPE_DIM)),
        events=[_PAD_EVENT] * MAX_EVENTS,
        arg_embedding=np.zeros(ARG_DIM),
    )


def write_records(path, records: dict) -> None:
    """Serialize date -> EventRecord to a versioned JSON document."""
    modeldoc.dump(path, "event-records", {
        "dates": {date: rec.to_dict() for date, rec in records.items()},
    })


def read_records(path) -> dict:
    doc = modeldoc.load(path, "event-records")
    return {date: EventRecord.from_dict(obj) for date, obj in doc["dates"].items()}


@dataclass
class OdeeParams:
    """All trainable pieces of the generative model plus the encoder."""

    num_slots: int
    feature_dim: int
    vocab: list
    alpha_mean: np.ndarray
    alpha_logvar: np.ndarray
    theta: MlpHead
    lam_logits: np.ndarray
    beta_mean: np.ndarray
    beta_logvar: np.ndarray
    gamma_mean: np.ndarray
    gamma_logvar: np.ndarray
    encoder: MlpHead
    seed: int
    elbo_history: list = field(default_factory=list)

    def __post_init__(self):
        k, f, v = self.num_slots, self.feature_dim, len(self.vocab)
        if k < 1:
            raise ValueError("need at least one slot")
        if self.vocab[0] != OOV_TOKEN:
            raise ValueError("vocabulary must start with the OOV bucket")
        shapes = {
            "alpha_mean": (TYPE_DIM,), "alpha_logvar": (TYPE_DIM,),
            "lam_logits": (k, v), "beta_mean": (k, f), "beta_logvar": (k, f),
            "gamma_mean": (k,), "gamma_logvar": (k,),
        }
        for name, shape in shapes.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
        self._vocab_index = {tok: i for i, tok in enumerate(self.vocab)}

    @property
    def slot_multinomials(self) -> np.ndarray:
        """Per-slot head-word distributions; rows sum to one."""
        return _softmax(self.lam_logits, axis=1)

    def head_index(self, head: str) -> int:
        return self._vocab_index.get(head, 0)

    def to_json(self, path) -> None:
        modeldoc.dump(path, "odee-params", {
            "num_slots": self.num_slots,
            "feature_dim": self.feature_dim,
            "vocab": self.vocab,
            "seed": self.seed,
            "elbo_history": self.elbo_history,
            "arrays": {
                name: getattr(self, name)
                for name in ("alpha_mean", "alpha_logvar", "lam_logits",
                             "beta_mean", "beta_logvar", "gamma_mean",
                             "gamma_logvar")
            },
            "theta": {"dims": _mlp_dims(self.theta), "params": self.theta.params},
            "encoder": {"dims": _mlp_dims(self.encoder),
                        "params": self.encoder.params},
        })

    @classmethod
    def from_json(cls, path) -> "OdeeParams":
        doc = modeldoc.load(path, "odee-params")
        arrays = {k: np.asarray(v, dtype=float) for k, v in doc["arrays"].items()}
        return cls(
            num_slots=doc["num_slots"],
            feature_dim=doc["feature_dim"],
            vocab=list(doc["vocab"]),
            seed=doc["seed"],
            elbo_history=list(doc["elbo_history"]),
            theta=_mlp_from_doc(doc["theta"], doc["seed"]),
            encoder=_mlp_from_doc(doc["encoder"], doc["seed"]),
            **arrays,
        )


def _mlp_dims(head: MlpHead) -> list:
    return [head.weights[0].shape[0]] + [w.shape[1] for w in head.weights]


def _mlp_from_doc(obj, seed) -> MlpHead:
    n_layers = len(obj["dims"]) - 1
    head = MlpHead(
        weights=[np.asarray(obj["params"][f"W{k}"], dtype=float)
                 for k in range(n_layers)],
        biases=[np.asarray(obj["params"][f"b{k}"], dtype=float).reshape(-1)
                for k in range(n_layers)],
        seed=seed,
    )
    head.validate()
    return head


def _softmax(z, axis=-1):
    shifted = z - np.max(z, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=axis, keepdims=True)


def _log_softmax(z, axis=-1):
    shifted = z - np.max(z, axis=axis, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=axis, keepdims=True))


def _gauss_logpdf(x, mean, logvar):
    """Diagonal Gaussian log density, summed over the last axis."""
    var = np.exp(logvar)
    return -0.5 * np.sum(np.log(2.0 * np.pi) + logvar + (x - mean) ** 2 / var,
                         axis=-1)


@dataclass
class _ClusterData:
    features: np.ndarray  # (E, F)
    head_idx: np.ndarray  # (E,)
    redundancy: np.ndarray  # (E,)
    encoder_input: np.ndarray  # (F,)


def _prepare(params: OdeeParams, cluster: NewsCluster) -> _ClusterData:
    feats = np.array([e.feature for e in cluster.entities], dtype=float)
    if feats.size and feats.shape[1] != params.feature_dim:
        raise ValueError(
            f"entity features have dimension {feats.shape[1]}, "
            f"model expects {params.feature_dim}"
        )
    return _ClusterData(
        features=feats.reshape(len(cluster.entities), params.feature_dim),
        head_idx=np.array([params.head_index(e.head) for e in cluster.entities],
                          dtype=int),
        redundancy=np.array([e.redundancy for e in cluster.entities], dtype=float),
        encoder_input=(feats.mean(axis=0) if feats.size
                       else np.zeros(params.feature_dim)),
    )


def _entity_log_table(params: OdeeParams, data: _ClusterData, log_pi,
                      include_redundancy: bool) -> np.ndarray:
    """(E, K) table of log p(s|t) + log p(h|s) + log p(f|s) [+ log p(r|s)]."""
    log_lam = _log_softmax(params.lam_logits, axis=1)
    table = log_pi[None, :] + log_lam[:, data.head_idx].T
    table = table + _gauss_logpdf(
        data.features[:, None, :], params.beta_mean[None, :, :],
        params.beta_logvar[None, :, :])
    if include_redundancy:
        table = table + _gauss_logpdf(
            data.redundancy[:, None, None], params.gamma_mean[None, :, None],
            params.gamma_logvar[None, :, None])
    return table


def _elbo_and_grads(params: OdeeParams, data: _ClusterData, eps: np.ndarray):
    """Single-sample reparameterized ELBO and its analytic gradients.

    Returns (elbo, grads) where grads maximize the ELBO (caller negates
    for a minimizer). Gradient keys: the array fields of OdeeParams plus
    `theta.<p>` and `enc.<p>` for the MLP parameters.
    """
    n_entities = data.features.shape[0]
    enc_out, enc_acts = mlp_forward(params.encoder, data.encoder_input)
    mu, w = enc_out[:TYPE_DIM], enc_out[TYPE_DIM:]
    sigma = np.exp(0.5 * w)
    t = mu + sigma * eps

    logits, theta_acts = mlp_forward(params.theta, t)
    log_pi = _log_softmax(logits)
    pi = np.exp(log_pi)

    table = _entity_log_table(params, data, log_pi, include_redundancy=True)
    row_max = table.max(axis=1, keepdims=True)
    log_like = row_max[:, 0] + np.log(np.exp(table - row_max).sum(axis=1))
    resp = np.exp(table - log_like[:, None])  # (E, K), rows sum to 1

    a_var = np.exp(params.alpha_logvar)
    diff = mu - params.alpha_mean
    kl = 0.5 * np.sum(params.alpha_logvar - w
                      + (np.exp(w) + diff ** 2) / a_var - 1.0)
    elbo = float(log_like.sum() - kl)

    grads = {}
    # theta head: d/dlogits of sum_e log_like
    resp_col = resp.sum(axis=0)
    dlogits = resp_col - n_entities * pi
    theta_grads, dt = mlp_backward(params.theta, theta_acts, dlogits[None, :])
    dt = dt[0]
    for name, g in theta_grads.items():
        grads[f"theta.{name}"] = g

    # lambda logits: responsibility-weighted indicator minus expected count
    lam = _softmax(params.lam_logits, axis=1)
    dlam = np.zeros_like(params.lam_logits)
    np.add.at(dlam.T, data.head_idx, resp)
    grads["lam_logits"] = dlam - resp_col[:, None] * lam

    # beta: Gaussian score functions weighted by responsibilities
    b_var = np.exp(params.beta_logvar)
    fdiff = data.features[:, None, :] - params.beta_mean[None, :, :]
    grads["beta_mean"] = np.einsum("ek,ekf->kf", resp, fdiff / b_var[None, :, :])
    grads["beta_logvar"] = 0.5 * np.einsum(
        "ek,ekf->kf", resp, fdiff ** 2 / b_var[None, :, :] - 1.0)

    g_var = np.exp(params.gamma_logvar)
    rdiff = data.redundancy[:, None] - params.gamma_mean[None, :]
    grads["gamma_mean"] = np.sum(resp * rdiff / g_var[None, :], axis=0)
    grads["gamma_logvar"] = 0.5 * np.sum(
        resp * (rdiff ** 2 / g_var[None, :] - 1.0), axis=0)

    # encoder: dt flows into mu and (via the sample path) into logvar,
    # and the KL contributes to both directly
    dmu = dt - diff / a_var
    dw = dt * 0.5 * sigma * eps + 0.5 * (1.0 - np.exp(w) / a_var)
    enc_grads, _ = mlp_backward(params.encoder, enc_acts,
                                np.concatenate((dmu, dw))[None, :])
    for name, g in enc_grads.items():
        grads[f"enc.{name}"] = g

    grads["alpha_mean"] = diff / a_var
    grads["alpha_logvar"] = 0.5 * ((np.exp(w) + diff ** 2) / a_var - 1.0)
    return elbo, grads


def _flat_params(params: OdeeParams) -> dict:
    flat = {name: getattr(params, name)
            for name in ("alpha_mean", "alpha_logvar", "lam_logits", "beta_mean",
                         "beta_logvar", "gamma_mean", "gamma_logvar")}
    for name, arr in params.theta.params.items():
        flat[f"theta.{name}"] = arr
    for name, arr in params.encoder.params.items():
        flat[f"enc.{name}"] = arr
    return flat


def _apply_flat(params: OdeeParams, flat: dict) -> None:
    for name in ("alpha_mean", "alpha_logvar", "lam_logits", "beta_mean",
                 "beta_logvar", "gamma_mean", "gamma_logvar"):
        setattr(params, name, flat[name])
    params.theta.replace_params(
        {k.split(".", 1)[1]: v for k, v in flat.items() if k.startswith("theta.")})
    params.encoder.replace_params(
        {k.split(".", 1)[1]: v for k, v in flat.items() if k.startswith("enc.")})


def _init_params(corpus, K, feature_dim, vocab, seed, hidden_dim) -> OdeeParams:
    rng = np.random.default_rng(seed)
    all_feats = np.concatenate(
        [np.array([e.feature for e in c.entities], dtype=float).reshape(-1, feature_dim)
         for c in corpus if c.entities])
    all_red = np.concatenate(
        [[e.redundancy for e in c.entities] for c in corpus if c.entities])
    # seed slot centers on actual entity features, farthest-point style,
    # so distinct data modes start under distinct slots
    chosen = [int(rng.integers(all_feats.shape[0]))]
    for _ in range(1, K):
        d2 = np.min(
            [np.sum((all_feats - all_feats[i]) ** 2, axis=1) for i in chosen],
            axis=0)
        chosen.append(int(np.argmax(d2)))
    centers = all_feats[chosen]
    feat_var = np.maximum(all_feats.var(axis=0), 1e-3)
    red_var = max(float(np.var(all_red)), 1e-3)
    return OdeeParams(
        num_slots=K,
        feature_dim=feature_dim,
        vocab=vocab,
        alpha_mean=np.zeros(TYPE_DIM),
        alpha_logvar=np.zeros(TYPE_DIM),
        theta=init_mlp([TYPE_DIM, hidden_dim, K], seed=seed),
        lam_logits=0.01 * rng.standard_normal((K, len(vocab))),
        beta_mean=centers,
        beta_logvar=np.tile(np.log(feat_var), (K, 1)),
        gamma_mean=np.full(K, float(np.mean(all_red))),
        gamma_logvar=np.full(K, np.log(red_var)),
        encoder=init_mlp([feature_dim, hidden_dim, 2 * TYPE_DIM], seed=seed + 1),
        seed=seed,
    )


def train(corpus, K: int, epochs: int, *, seed: int = 0, lr: float = 0.005,
          beta1: float = 0.8, beta2: float = 0.999, hidden_dim: int = 32,
          batch_size: int = 16) -> OdeeParams:
    """Fit the generative model to a cluster corpus by SVI."""
    corpus = list(corpus)
    if not corpus:
        raise InsufficientDataError("cannot train on an empty corpus")
    if K < 1:
        raise ValueError("need at least one slot")
    total_entities = sum(len(c.entities) for c in corpus)
    if K > total_entities:
        raise InsufficientDataError(
            f"{K} slots exceed the {total_entities} entities in the corpus"
        )
    with_entities = [c for c in corpus if c.entities]
    feature_dim = with_entities[0].entities[0].feature.shape[0]
    heads = sorted({e.head for c in with_entities for e in c.entities})
    vocab = [OOV_TOKEN] + heads

    params = _init_params(with_entities, K, feature_dim, vocab, seed, hidden_dim)
    data = [_prepare(params, c) for c in with_entities]
    rng = np.random.default_rng(seed)
    state = init_adam(_flat_params(params), lr=lr, beta1=beta1, beta2=beta2)

    for epoch in range(epochs):
        order = rng.permutation(len(data))
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            total = None
            batch_elbo = 0.0
            for idx in batch:
                eps = rng.standard_normal(TYPE_DIM)
                elbo, grads = _elbo_and_grads(params, data[idx], eps)
                batch_elbo += elbo
                if total is None:
                    total = grads
                else:
                    for k in total:
                        total[k] = total[k] + grads[k]
            if not np.isfinite(batch_elbo):
                raise OptimizationError(
                    "ELBO diverged during training",
                    diagnostics={"epoch": epoch, "elbo": batch_elbo},
                )
            scale = -1.0 / len(batch)  # maximize: feed Adam the negated mean
            flat = _flat_params(params)
            new_flat = adam_step(state, flat,
                                 {k: scale * g for k, g in total.items()})
            _apply_flat(params, new_flat)
        params.elbo_history.append(eval_elbo(params, with_entities))
    return params


def eval_elbo(params: OdeeParams, corpus) -> float:
    """Deterministic mean per-cluster ELBO at the posterior mean (eps=0)."""
    clusters = [c for c in corpus if c.entities]
    if not clusters:
        raise InsufficientDataError("no clusters with entities to evaluate")
    zero = np.zeros(TYPE_DIM)
    total = 0.0
    for cluster in clusters:
        elbo, _ = _elbo_and_grads(params, _prepare(params, cluster), zero)
        total += elbo
    return total / len(clusters)


def infer_type(params: OdeeParams, cluster: NewsCluster) -> EventTypeVector:
    """Posterior mean of the latent type vector; deterministic."""
    data = _prepare(params, cluster)
    enc_out, _ = mlp_forward(params.encoder, data.encoder_input)
    return EventTypeVector(enc_out[:TYPE_DIM])


def slot_log_likelihoods(params: OdeeParams, cluster: NewsCluster,
                         t: EventTypeVector) -> np.ndarray:
    """(E, K) log of the three-factor assignment score."""
    data = _prepare(params, cluster)
    logits, _ = mlp_forward(params.theta, t.values)
    return _entity_log_table(params, data, _log_softmax(logits),
                             include_redundancy=False)


def assign_slots(params: OdeeParams, cluster: NewsCluster,
                 t: EventTypeVector) -> np.ndarray:
    """Maximum-likelihood slot per entity."""
    table = slot_log_likelihoods(params, cluster, t)
    return table.argmax(axis=1) if table.size else np.zeros(0, dtype=int)


def _argument_phrase(sentence, head_token) -> list:
    """Head plus its adjacent modifier dependents, in token order."""
    keep = [head_token]
    for tok in sentence.tokens:
        if tok.head == head_token.index and tok.deprel in _PHRASE_DEPRELS:
            keep.append(tok)
    keep.sort(key=lambda tok: tok.index)
    return [tok.form for tok in keep]


def assemble_events(params: OdeeParams, cluster: NewsCluster,
                    slots: np.ndarray, t: EventTypeVector,
                    table: EmbeddingTable) -> EventRecord:
    """Build the fixed-shape top-5 event record for one cluster."""
    if cluster.documents is None:
        raise AlignmentError(
            "cluster has no token annotations; run the preproc annotator first"
        )
    if table.dim != ARG_DIM:
        raise ValueError(f"argument embeddings must have dimension {ARG_DIM}")

    scores = slot_log_likelihoods(params, cluster, t)
    best = scores.max(axis=1) if scores.size else np.zeros(0)
    # shifting all log scores by the cluster max rescales every summed
    # likelihood by the same positive constant, so ranking is unchanged
    if best.size:
        best = best - best.max()
    by_sentence = {}
    for pos, ent in enumerate(cluster.entities):
        by_sentence.setdefault((ent.item_id, ent.sent_id), []).append(pos)

    candidates = []
    order = 0
    for doc in cluster.documents:
        for sentence in doc.sentences:
            ent_positions = by_sentence.get((doc.item_id, sentence.sent_id), [])
            tokens_by_index = {tok.index: tok for tok in sentence.tokens}
            for tok in sentence.tokens:
                is_trigger = (
                    tok.upos == "VERB"
                    or tok.deprel in TRIGGER_DEPRELS
                    or (tok.upos in _NOUN_UPOS
                        and tok.supersense in EVENT_SUPERSENSES)
                )
                if not is_trigger:
                    continue
                arguments = []
                event_tokens = [tok.form]
                likelihood = 0.0
                for pos in ent_positions:
                    ent = cluster.entities[pos]
                    if ent.token_index == tok.index:
                        continue
                    head_tok = tokens_by_index.get(ent.token_index)
                    phrase = (_argument_phrase(sentence, head_tok)
                              if head_tok is not None else [ent.head])
                    arguments.append((int(slots[pos]), " ".join(phrase)))
                    event_tokens.extend(phrase)
                    likelihood += float(np.exp(best[pos]))
                candidates.append((
                    -likelihood, order,
                    AssembledEvent(
                        trigger=tok.form,
                        arguments=tuple(arguments),
                        tokens=tuple(event_tokens[:MAX_EVENT_TOKENS]),
                    ),
                ))
                order += 1

    candidates.sort(key=lambda item: (item[0], item[1]))
    kept = [c[2] for c in candidates[:MAX_EVENTS]]
    arg_tokens = [word.lower() for ev in kept
                  for _, phrase in ev.arguments for word in phrase.split()]
    while len(kept) < MAX_EVENTS:
        kept.append(_PAD_EVENT)
    return EventRecord(
        type_vec=t,
        events=kept,
        arg_embedding=table.mean(arg_tokens),
    )


def build_clusters(dated_docs: dict, table: EmbeddingTable,
                   window: int = 2) -> list:
    """Turn annotated documents into clusters with entity mentions.

    Entities are noun tokens; the feature vector concatenates the head
    embedding with the mean embedding of a +-`window` token context; the
    redundancy ratio is the fraction of the cluster's items mentioning
    the head word.
    """
    clusters = []
    for date in sorted(dated_docs):
        docs = dated_docs[date]
        doc_vocab = [
            {tok.form.lower() for sent in doc.sentences for tok in sent.tokens}
            for doc in docs
        ]
        items = []
        entities = []
        for doc in docs:
            first = doc.sentences[0].forms() if doc.sentences else []
            items.append(NewsItem(item_id=doc.item_id,
                                  headline=" ".join(first)))
            for sentence in doc.sentences:
                forms = [tok.form.lower() for tok in sentence.tokens]
                for k, tok in enumerate(sentence.tokens):
                    if tok.upos not in _NOUN_UPOS:
                        continue
                    head = tok.form.lower()
                    context = forms[max(0, k - window):k] + forms[k + 1:k + 1 + window]
                    feature = np.concatenate(
                        (table.lookup(head), table.mean(context)))
                    mentions = sum(1 for vocab in doc_vocab if head in vocab)
                    entities.append(Entity(
                        head=head, item_id=doc.item_id, sent_id=sentence.sent_id,
                        token_index=tok.index, feature=feature,
                        redundancy=mentions / len(docs),
                    ))
        clusters.append(NewsCluster(date=date, items=items, entities=entities,
                                    documents=docs))
    return clusters
