"""GRU sequence auto-encoder over frequency representations.

The encoder GRU reads the m (real, imag) coefficient pairs of one series and
its final hidden state is the code.  The decoder GRU receives that code as
its input at every one of the m timesteps (repeat-vector wiring), starting
from a zero hidden state, and a linear projection maps each decoder state
back to a coefficient pair.  Training minimizes the mean squared
reconstruction error with exact backpropagation through time and Adam.

All randomness flows from one seed; the shuffle and evaluation streams use
the documented fixed offsets below so partial reruns are reproducible.
"""

from __future__ import annotations

import hashlib
import json
import logging
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import Corpus
from .errors import (
    DivergenceError,
    EmptyInputError,
    InvalidInputError,
    SerializationError,
    ShapeError,
)
from .fourier import FrequencyRepresentation

logger = logging.getLogger(__name__)

MODEL_MAGIC = b"FFADMODL"
MODEL_VERSION = 1

# Subsystem seeds are derived from the run seed by fixed offsets.
SEED_SHUFFLE_OFFSET = 1
SEED_EVAL_OFFSET = 2
SEED_REPEAT_OFFSET = 1000


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


@dataclass
class GruLayerParams:
    """Weights of one GRU layer: gate matrices, recurrent matrices, biases."""

    W_z: np.ndarray  # [H, input_dim]
    W_r: np.ndarray
    W_h: np.ndarray
    U_z: np.ndarray  # [H, H]
    U_r: np.ndarray
    U_h: np.ndarray
    b_z: np.ndarray  # [H]
    b_r: np.ndarray
    b_h: np.ndarray

    def __post_init__(self):
        h, d = self.W_z.shape
        shapes = {
            "W_z": (h, d), "W_r": (h, d), "W_h": (h, d),
            "U_z": (h, h), "U_r": (h, h), "U_h": (h, h),
            "b_z": (h,), "b_r": (h,), "b_h": (h,),
        }
        for name, expected in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != expected:
                raise ShapeError(f"{name} has shape {arr.shape}, expected {expected}")
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError(f"{name} contains non-finite values")
            setattr(self, name, arr)

    @property
    def input_dim(self) -> int:
        return self.W_z.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.W_z.shape[0]


@dataclass
class ModelMetadata:
    epoch: int = 0
    seed: int | None = None
    normalization: str = "none"
    loss_history: tuple[float, ...] = ()

    def __post_init__(self):
        if self.epoch < 0:
            raise InvalidInputError(f"epoch must be >= 0, got {self.epoch}")


@dataclass
class AutoencoderModel:
    """Encoder + decoder GRU parameters and the output projection."""

    encoder: GruLayerParams  # input_dim = 2
    decoder: GruLayerParams  # input_dim = hidden_dim
    proj_w: np.ndarray  # [2, H]
    proj_b: np.ndarray  # [2]
    m: int
    metadata: ModelMetadata = field(default_factory=ModelMetadata)

    def __post_init__(self):
        h = self.encoder.hidden_dim
        if self.encoder.input_dim != 2:
            raise ShapeError(f"encoder input_dim must be 2, got {self.encoder.input_dim}")
        if self.decoder.hidden_dim != h or self.decoder.input_dim != h:
            raise ShapeError("decoder dims must equal the encoder hidden size")
        self.proj_w = np.asarray(self.proj_w, dtype=np.float64)
        self.proj_b = np.asarray(self.proj_b, dtype=np.float64)
        if self.proj_w.shape != (2, h) or self.proj_b.shape != (2,):
            raise ShapeError(
                f"projection shapes {self.proj_w.shape}/{self.proj_b.shape} "
                f"inconsistent with hidden size {h}"
            )
        if self.m < 1:
            raise InvalidInputError(f"sequence length m must be >= 1, got {self.m}")

    @property
    def hidden_dim(self) -> int:
        return self.encoder.hidden_dim


@dataclass(frozen=True)
class EncodedSet:
    """Encoded vectors of one sample set, tagged with their origin."""

    vectors: np.ndarray  # [n, H]
    source_id: str = ""
    model_fingerprint: str = ""

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2:
            raise ShapeError(f"encoded vectors must be [n, H], got {vectors.shape}")
        if not np.all(np.isfinite(vectors)):
            raise InvalidInputError("encoded vectors contain non-finite values")
        object.__setattr__(self, "vectors", vectors)

    def __len__(self) -> int:
        return self.vectors.shape[0]


def _init_gru(rng, input_dim: int, hidden_dim: int) -> GruLayerParams:
    bound = 1.0 / np.sqrt(hidden_dim)
    u = lambda *shape: rng.uniform(-bound, bound, size=shape)
    return GruLayerParams(
        W_z=u(hidden_dim, input_dim), W_r=u(hidden_dim, input_dim),
        W_h=u(hidden_dim, input_dim),
        U_z=u(hidden_dim, hidden_dim), U_r=u(hidden_dim, hidden_dim),
        U_h=u(hidden_dim, hidden_dim),
        b_z=np.zeros(hidden_dim), b_r=np.zeros(hidden_dim),
        b_h=np.zeros(hidden_dim),
    )


def init_model(
    m: int, hidden_dim: int, seed: int, normalization: str = "none"
) -> AutoencoderModel:
    """Seeded uniform [-1/sqrt(H), 1/sqrt(H)] weights, zero biases.

    Draws happen in parameter-block order (encoder, decoder, projection),
    so a given seed always produces the same model.
    """
    rng = np.random.default_rng(seed)
    hidden_dim = int(hidden_dim)
    encoder = _init_gru(rng, 2, hidden_dim)
    decoder = _init_gru(rng, hidden_dim, hidden_dim)
    bound = 1.0 / np.sqrt(hidden_dim)
    proj_w = rng.uniform(-bound, bound, size=(2, hidden_dim))
    return AutoencoderModel(
        encoder=encoder,
        decoder=decoder,
        proj_w=proj_w,
        proj_b=np.zeros(2),
        m=int(m),
        metadata=ModelMetadata(seed=seed, normalization=normalization),
    )


_GRU_FIELDS = ("W_z", "W_r", "W_h", "U_z", "U_r", "U_h", "b_z", "b_r", "b_h")


def parameter_blocks(model: AutoencoderModel) -> list[tuple[str, np.ndarray]]:
    """Named parameter arrays in the canonical (serialization) order."""
    blocks = []
    for prefix, layer in (("encoder", model.encoder), ("decoder", model.decoder)):
        blocks.extend((f"{prefix}.{name}", getattr(layer, name)) for name in _GRU_FIELDS)
    blocks.append(("proj_w", model.proj_w))
    blocks.append(("proj_b", model.proj_b))
    return blocks


def copy_model(model: AutoencoderModel) -> AutoencoderModel:
    def copy_layer(layer):
        return GruLayerParams(**{f: getattr(layer, f).copy() for f in _GRU_FIELDS})

    return AutoencoderModel(
        encoder=copy_layer(model.encoder),
        decoder=copy_layer(model.decoder),
        proj_w=model.proj_w.copy(),
        proj_b=model.proj_b.copy(),
        m=model.m,
        metadata=replace(model.metadata),
    )


def _parameter_bytes(model: AutoencoderModel) -> bytes:
    parts = [struct.pack("<II", model.m, model.hidden_dim)]
    parts.extend(
        np.ascontiguousarray(arr, dtype="<f8").tobytes()
        for _, arr in parameter_blocks(model)
    )
    return b"".join(parts)


def model_fingerprint(model: AutoencoderModel) -> str:
    """Content hash of the serialized parameters (stable across save/load)."""
    return hashlib.sha256(_parameter_bytes(model)).hexdigest()


def gru_step(params: GruLayerParams, x, h_prev):
    """One GRU update.

    z = sigmoid(W_z x + U_z h + b_z), r = sigmoid(W_r x + U_r h + b_r),
    hbar = tanh(W_h x + U_h (r * h) + b_h), h' = (1 - z) * h + z * hbar.

    ``x`` and ``h_prev`` may be single vectors or [batch, dim] arrays.
    """
    x = np.asarray(x, dtype=np.float64)
    h_prev = np.asarray(h_prev, dtype=np.float64)
    if x.shape[-1] != params.input_dim or h_prev.shape[-1] != params.hidden_dim:
        raise ShapeError(
            f"gru_step got x{x.shape}, h{h_prev.shape} for layer "
            f"[{params.hidden_dim} x {params.input_dim}]"
        )
    z = _sigmoid(x @ params.W_z.T + h_prev @ params.U_z.T + params.b_z)
    r = _sigmoid(x @ params.W_r.T + h_prev @ params.U_r.T + params.b_r)
    hbar = np.tanh(x @ params.W_h.T + (r * h_prev) @ params.U_h.T + params.b_h)
    return (1.0 - z) * h_prev + z * hbar


def _gru_forward(params: GruLayerParams, inputs):
    """Run a GRU over inputs [T, B, in]; returns hidden states and gate cache."""
    t_steps, batch, _ = inputs.shape
    h = np.zeros((t_steps + 1, batch, params.hidden_dim))
    z_all = np.empty((t_steps, batch, params.hidden_dim))
    r_all = np.empty_like(z_all)
    hbar_all = np.empty_like(z_all)
    for t in range(t_steps):
        x = inputs[t]
        h_prev = h[t]
        z = _sigmoid(x @ params.W_z.T + h_prev @ params.U_z.T + params.b_z)
        r = _sigmoid(x @ params.W_r.T + h_prev @ params.U_r.T + params.b_r)
        hbar = np.tanh(x @ params.W_h.T + (r * h_prev) @ params.U_h.T + params.b_h)
        h[t + 1] = (1.0 - z) * h_prev + z * hbar
        z_all[t], r_all[t], hbar_all[t] = z, r, hbar
    return h, (z_all, r_all, hbar_all)


def _gru_backward(params: GruLayerParams, inputs, h, cache, dh_out):
    """BPTT through one GRU.

    ``dh_out[t]`` is the loss gradient injected into h_t from outside the
    recurrence (projection outputs, or the code consumer at the last step).
    Returns (per-field gradients, gradient w.r.t. inputs).
    """
    z_all, r_all, hbar_all = cache
    t_steps = inputs.shape[0]
    grads = {name: np.zeros_like(getattr(params, name)) for name in _GRU_FIELDS}
    dx = np.empty_like(inputs)
    carry = np.zeros_like(dh_out[0])
    for t in range(t_steps - 1, -1, -1):
        dh = carry + dh_out[t]
        x, h_prev = inputs[t], h[t]
        z, r, hbar = z_all[t], r_all[t], hbar_all[t]

        dhbar = dh * z
        dah = dhbar * (1.0 - hbar**2)
        dz = dh * (hbar - h_prev)
        daz = dz * z * (1.0 - z)

        gated = r * h_prev
        grads["W_h"] += dah.T @ x
        grads["U_h"] += dah.T @ gated
        grads["b_h"] += dah.sum(axis=0)
        dgated = dah @ params.U_h
        dr = dgated * h_prev
        dar = dr * r * (1.0 - r)
        grads["W_r"] += dar.T @ x
        grads["U_r"] += dar.T @ h_prev
        grads["b_r"] += dar.sum(axis=0)
        grads["W_z"] += daz.T @ x
        grads["U_z"] += daz.T @ h_prev
        grads["b_z"] += daz.sum(axis=0)

        dx[t] = daz @ params.W_z + dar @ params.W_r + dah @ params.W_h
        carry = dh * (1.0 - z) + dgated * r + dar @ params.U_r + daz @ params.U_z
    return grads, dx


def _as_batch(model: AutoencoderModel, batch) -> np.ndarray:
    if isinstance(batch, np.ndarray):
        data = batch
    else:
        reps = list(batch)
        if not reps:
            raise EmptyInputError("batch is empty")
        lengths = {r.m for r in reps}
        if lengths != {model.m}:
            raise ShapeError(
                f"batch has m values {sorted(lengths)}, model expects m={model.m}"
            )
        data = np.stack([r.coeffs for r in reps])
    if data.ndim != 3 or data.shape[1:] != (model.m, 2):
        raise ShapeError(f"batch shape {data.shape} incompatible with m={model.m}")
    if data.shape[0] == 0:
        raise EmptyInputError("batch is empty")
    return np.asarray(data, dtype=np.float64)


def _forward(model: AutoencoderModel, data: np.ndarray, keep: bool = False):
    """Full auto-encoder pass over data [B, m, 2]; optionally keeps caches."""
    batch = data.shape[0]
    enc_in = np.ascontiguousarray(data.transpose(1, 0, 2))
    enc_h, enc_cache = _gru_forward(model.encoder, enc_in)
    latent = enc_h[-1]
    dec_in = np.broadcast_to(latent, (model.m, batch, model.hidden_dim))
    dec_h, dec_cache = _gru_forward(model.decoder, dec_in)
    outputs = dec_h[1:] @ model.proj_w.T + model.proj_b  # [m, B, 2]
    loss = float(np.mean((outputs - enc_in) ** 2))
    if not keep:
        return loss, outputs
    return loss, outputs, enc_in, enc_h, enc_cache, latent, dec_in, dec_h, dec_cache


def encode(model: AutoencoderModel, rep: FrequencyRepresentation) -> np.ndarray:
    """Final encoder hidden state for one representation (zero initial state)."""
    if rep.m != model.m:
        raise ShapeError(f"representation has m={rep.m}, model expects m={model.m}")
    inputs = np.ascontiguousarray(rep.coeffs[:, None, :])
    h, _ = _gru_forward(model.encoder, inputs)
    return h[-1, 0].copy()


def decode(model: AutoencoderModel, latent) -> np.ndarray:
    """Reconstruct an [m, 2] coefficient array from a code vector.

    The code is fed to the decoder as its input at every timestep; each
    hidden state is linearly projected to a coefficient pair.  A [B, H]
    batch of codes yields [B, m, 2].
    """
    latent = np.asarray(latent, dtype=np.float64)
    single = latent.ndim == 1
    if latent.shape[-1] != model.hidden_dim:
        raise ShapeError(
            f"latent dim {latent.shape[-1]} != hidden size {model.hidden_dim}"
        )
    batch = latent.reshape(1, -1) if single else latent
    dec_in = np.broadcast_to(batch, (model.m, batch.shape[0], model.hidden_dim))
    dec_h, _ = _gru_forward(model.decoder, dec_in)
    outputs = (dec_h[1:] @ model.proj_w.T + model.proj_b).transpose(1, 0, 2)
    return outputs[0] if single else outputs


def batch_loss(model: AutoencoderModel, batch) -> float:
    """Mean squared reconstruction error: sum / (batch * m * 2)."""
    data = _as_batch(model, batch)
    loss, _ = _forward(model, data)
    return loss


def gradients(model: AutoencoderModel, batch) -> dict:
    """Exact loss gradients for every parameter block, via BPTT."""
    _, grads = loss_and_gradients(model, batch)
    return grads


def loss_and_gradients(model: AutoencoderModel, batch):
    """Batch loss plus its gradients, keyed like :func:`parameter_blocks`."""
    data = _as_batch(model, batch)
    (loss, outputs, enc_in, enc_h, enc_cache, latent, dec_in, dec_h, dec_cache) = (
        _forward(model, data, keep=True)
    )
    batch_n = data.shape[0]
    d_out = (2.0 / (batch_n * model.m * 2)) * (outputs - enc_in)  # [m, B, 2]

    grads = {
        "proj_w": np.einsum("tbo,tbh->oh", d_out, dec_h[1:]),
        "proj_b": d_out.sum(axis=(0, 1)),
    }
    dh_dec = d_out @ model.proj_w  # [m, B, H]
    dec_grads, d_dec_in = _gru_backward(model.decoder, dec_in, dec_h, dec_cache, dh_dec)
    for name, g in dec_grads.items():
        grads[f"decoder.{name}"] = g

    dh_enc = np.zeros((model.m, batch_n, model.hidden_dim))
    dh_enc[-1] = d_dec_in.sum(axis=0)  # code feeds every decoder step
    enc_grads, _ = _gru_backward(model.encoder, enc_in, enc_h, enc_cache, dh_enc)
    for name, g in enc_grads.items():
        grads[f"encoder.{name}"] = g
    return loss, grads


def encode_set(
    model: AutoencoderModel, reps: Sequence[FrequencyRepresentation], source_id: str = ""
) -> EncodedSet:
    """Encode a list of representations; provenance records the model hash."""
    reps = list(reps)
    fingerprint = model_fingerprint(model)
    if not reps:
        return EncodedSet(
            vectors=np.zeros((0, model.hidden_dim)),
            source_id=source_id,
            model_fingerprint=fingerprint,
        )
    data = _as_batch(model, reps)
    enc_in = np.ascontiguousarray(data.transpose(1, 0, 2))
    h, _ = _gru_forward(model.encoder, enc_in)
    return EncodedSet(
        vectors=h[-1].copy(), source_id=source_id, model_fingerprint=fingerprint
    )


@dataclass
class AdamHyper:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


class AdamState:
    """First/second moment accumulators, one pair per parameter block."""

    def __init__(self, blocks):
        self.m = {name: np.zeros_like(arr) for name, arr in blocks}
        self.v = {name: np.zeros_like(arr) for name, arr in blocks}


def adam_step(blocks, grads, state: AdamState, hyper: AdamHyper, t: int):
    """Standard Adam update with bias correction; parameters update in place."""
    if t < 1:
        raise InvalidInputError(f"Adam step index must be >= 1, got {t}")
    for name, param in blocks:
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise DivergenceError(f"non-finite gradient in parameter block {name!r}")
        m = state.m[name]
        v = state.v[name]
        m *= hyper.beta1
        m += (1.0 - hyper.beta1) * g
        v *= hyper.beta2
        v += (1.0 - hyper.beta2) * g * g
        m_hat = m / (1.0 - hyper.beta1**t)
        v_hat = v / (1.0 - hyper.beta2**t)
        param -= hyper.lr * m_hat / (np.sqrt(v_hat) + hyper.eps)
    return blocks, state


def clip_global_norm(grads: dict, max_norm: float) -> tuple[float, bool]:
    """Scale all gradients in place so their joint L2 norm is <= max_norm."""
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if max_norm > 0 and total > max_norm:
        factor = max_norm / total
        for g in grads.values():
            g *= factor
        return total, True
    return total, False


@dataclass
class TrainConfig:
    hidden_dim: int = 20
    learning_rate: float = 1e-3
    batch_size: int = 512
    epochs: int = 5000
    checkpoint_every: int = 500
    seed: int = 0
    clip_norm: float = 5.0
    eval_sample: int = 10000

    def __post_init__(self):
        for name in ("hidden_dim", "batch_size", "epochs", "checkpoint_every",
                     "eval_sample"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be positive")
        if self.learning_rate <= 0 or self.clip_norm <= 0:
            raise InvalidInputError("learning_rate and clip_norm must be positive")


@dataclass(frozen=True)
class Checkpoint:
    epoch: int
    train_mse: float
    test_mse: float


@dataclass
class TrainingLog:
    epoch_losses: list[float]
    checkpoints: list[Checkpoint]
    selected_epoch: int
    clip_events: int
    test_split_used: bool

    def to_csv(self) -> str:
        """Rows: epoch, mean train loss, test MSE at checkpoint epochs."""
        by_epoch = {c.epoch: c for c in self.checkpoints}
        lines = ["epoch,train_loss,checkpoint_test_mse"]
        for i, loss in enumerate(self.epoch_losses, start=1):
            tail = f"{by_epoch[i].test_mse:.17g}" if i in by_epoch else ""
            lines.append(f"{i},{loss:.17g},{tail}")
        return "\n".join(lines) + "\n"


def _eval_mse(model, data, indices, sample_size, rng) -> float:
    if indices.size > sample_size:
        indices = rng.choice(indices, size=sample_size, replace=False)
    return batch_loss(model, data[indices])


def train(corpus: Corpus, config: TrainConfig) -> tuple[AutoencoderModel, TrainingLog]:
    """Mini-batch training over shuffled corpus rows with model selection.

    Rows are reshuffled every epoch from a seeded stream.  Every
    ``checkpoint_every`` epochs (and at the final epoch) the train/test MSE
    is measured on seeded row samples and the model is snapshotted; the
    snapshot with the lowest test MSE is returned (earliest epoch wins
    ties).  Corpora without test rows fall back to train rows for
    selection.
    """
    if len(corpus) == 0:
        raise EmptyInputError("corpus is empty")
    train_idx = corpus.split_indices("train")
    test_idx = corpus.split_indices("test")
    if train_idx.size == 0:
        train_idx = np.arange(len(corpus))
    test_split_used = test_idx.size > 0
    eval_idx = test_idx if test_split_used else train_idx
    if not test_split_used:
        logger.warning("corpus has no test rows; selecting checkpoints on train MSE")

    model = init_model(corpus.m, config.hidden_dim, config.seed, corpus.normalization)
    blocks = parameter_blocks(model)
    state = AdamState(blocks)
    hyper = AdamHyper(lr=config.learning_rate)
    shuffle_rng = np.random.default_rng(config.seed + SEED_SHUFFLE_OFFSET)
    eval_rng = np.random.default_rng(config.seed + SEED_EVAL_OFFSET)

    data = corpus.data
    epoch_losses = []
    checkpoints = []
    clip_events = 0
    best = None  # (test_mse, epoch, snapshot)
    step = 0
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(train_idx)
        total, seen = 0.0, 0
        for start in range(0, order.size, config.batch_size):
            chunk = order[start : start + config.batch_size]
            loss, grads = loss_and_gradients(model, data[chunk])
            if not np.isfinite(loss):
                raise DivergenceError(f"non-finite training loss at epoch {epoch}")
            _, clipped = clip_global_norm(grads, config.clip_norm)
            clip_events += clipped
            step += 1
            adam_step(blocks, grads, state, hyper, step)
            total += loss * chunk.size
            seen += chunk.size
        epoch_loss = total / seen
        if not np.isfinite(epoch_loss):
            raise DivergenceError(f"non-finite training loss at epoch {epoch}")
        epoch_losses.append(epoch_loss)

        if epoch % config.checkpoint_every == 0 or epoch == config.epochs:
            train_mse = _eval_mse(model, data, train_idx, config.eval_sample, eval_rng)
            test_mse = _eval_mse(model, data, eval_idx, config.eval_sample, eval_rng)
            checkpoints.append(Checkpoint(epoch=epoch, train_mse=train_mse,
                                          test_mse=test_mse))
            if best is None or test_mse < best[0]:
                best = (test_mse, epoch, copy_model(model))
            logger.info(
                "epoch %d: train_mse=%.6g test_mse=%.6g", epoch, train_mse, test_mse
            )

    _, best_epoch, selected = best
    selected.metadata = ModelMetadata(
        epoch=best_epoch,
        seed=config.seed,
        normalization=corpus.normalization,
        loss_history=tuple(epoch_losses),
    )
    log = TrainingLog(
        epoch_losses=epoch_losses,
        checkpoints=checkpoints,
        selected_epoch=best_epoch,
        clip_events=clip_events,
        test_split_used=test_split_used,
    )
    if clip_events:
        logger.info("gradient clipping triggered on %d step(s)", clip_events)
    return selected, log


def save_model(model: AutoencoderModel, path) -> None:
    """Versioned binary: magic, dims, f64 parameter blocks, JSON metadata."""
    meta = {
        "epoch": model.metadata.epoch,
        "seed": model.metadata.seed,
        "normalization": model.metadata.normalization,
        "loss_history": list(model.metadata.loss_history),
    }
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<I", MODEL_VERSION))
        fh.write(_parameter_bytes(model))
        fh.write(json.dumps(meta, sort_keys=True).encode("utf-8"))


def load_model(path) -> AutoencoderModel:
    """Read a model written by :func:`save_model`; bit-exact round trip."""
    blob = Path(path).read_bytes()
    fixed = len(MODEL_MAGIC) + struct.calcsize("<I") + struct.calcsize("<II")
    if len(blob) < fixed:
        raise SerializationError(f"{path}: truncated model file")
    if blob[: len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise SerializationError(f"{path}: bad magic, not a model file")
    (version,) = struct.unpack_from("<I", blob, len(MODEL_MAGIC))
    if version != MODEL_VERSION:
        raise SerializationError(
            f"{path}: model version {version} unsupported (expected {MODEL_VERSION})"
        )
    m, hidden = struct.unpack_from("<II", blob, len(MODEL_MAGIC) + 4)
    shapes = []
    for prefix in ("encoder", "decoder"):
        in_dim = 2 if prefix == "encoder" else hidden
        shapes += [(hidden, in_dim)] * 3 + [(hidden, hidden)] * 3 + [(hidden,)] * 3
    shapes += [(2, hidden), (2,)]
    arrays = []
    offset = fixed
    for shape in shapes:
        count = int(np.prod(shape))
        if len(blob) < offset + count * 8:
            raise SerializationError(f"{path}: truncated parameter block")
        arrays.append(
            np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
            .reshape(shape)
            .astype(np.float64)
        )
        offset += count * 8
    try:
        meta = json.loads(blob[offset:].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SerializationError(f"{path}: corrupt metadata trailer: {exc}") from exc
    encoder = GruLayerParams(*arrays[0:9])
    decoder = GruLayerParams(*arrays[9:18])
    return AutoencoderModel(
        encoder=encoder,
        decoder=decoder,
        proj_w=arrays[18],
        proj_b=arrays[19],
        m=m,
        metadata=ModelMetadata(
            epoch=meta["epoch"],
            seed=meta["seed"],
            normalization=meta["normalization"],
            loss_history=tuple(meta["loss_history"]),
        ),
    )
