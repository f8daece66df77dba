//! Declarative architecture descriptions.
//!
//! An [`ArchSpec`] is a tree of [`LayerSpec`] nodes applied to an input
//! signature. Every cost indicator in this crate is a fold over that tree.
//! Residual connections are implicit inside `Attention` and `FeedForward`
//! and only contribute elementwise adds.

use std::collections::BTreeMap;
use std::fmt;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Bytes per element when a spec does not say otherwise (32-bit floats).
pub const DEFAULT_ELEMENT_BYTES: u32 = 4;

/// Maximum nesting of `Repeat`/`Parallel`/`MoE` nodes accepted by [`validate`].
pub const MAX_NESTING: usize = 32;

fn default_element_bytes() -> u32 {
    DEFAULT_ELEMENT_BYTES
}

fn default_true() -> bool {
    true
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArchError {
    #[error("patch {patch} does not divide input extent {extent}")]
    NotDivisible { extent: u64, patch: u64 },
    #[error("patch {patch} is larger than input extent {extent}")]
    PatchTooLarge { extent: u64, patch: u64 },
    #[error("dimension must be at least 1")]
    ZeroExtent,
    #[error("sequence length requires an image input")]
    NotAnImage,
    #[error("element count overflows a 64-bit accumulator")]
    Overflow,
}

/// A dense tensor shape with per-element storage size.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub struct TensorShape {
    pub dims: Vec<u64>,
    #[serde(default = "default_element_bytes")]
    pub element_bytes: u32,
}

impl TensorShape {
    pub fn new(dims: Vec<u64>, element_bytes: u32) -> Result<Self, ArchError> {
        if element_bytes == 0 || dims.contains(&0) {
            return Err(ArchError::ZeroExtent);
        }
        let shape = Self {
            dims,
            element_bytes,
        };
        shape.elements()?;
        Ok(shape)
    }

    pub fn elements(&self) -> Result<u64, ArchError> {
        self.dims
            .iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d))
            .ok_or(ArchError::Overflow)
    }

    pub fn bytes(&self) -> Result<u64, ArchError> {
        self.elements()?
            .checked_mul(u64::from(self.element_bytes))
            .ok_or(ArchError::Overflow)
    }
}

/// How a patch embedding treats image extents that are not a multiple of the patch.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema,
)]
#[serde(rename_all = "snake_case")]
pub enum PatchPadding {
    /// The patch must divide both extents.
    #[default]
    Exact,
    /// Zero-pad up to the next multiple (grid = ceil(extent / patch)).
    Same,
    /// Drop the remainder (grid = floor(extent / patch)).
    Valid,
}

impl PatchPadding {
    fn is_exact(&self) -> bool {
        *self == PatchPadding::Exact
    }

    /// Number of patches along one spatial extent.
    pub fn grid(self, extent: u64, patch: u64) -> Result<u64, ArchError> {
        if extent == 0 || patch == 0 {
            return Err(ArchError::ZeroExtent);
        }
        match self {
            PatchPadding::Exact if !extent.is_multiple_of(patch) => {
                Err(ArchError::NotDivisible { extent, patch })
            }
            PatchPadding::Exact => Ok(extent / patch),
            PatchPadding::Same => Ok(extent.div_ceil(patch)),
            PatchPadding::Valid if patch > extent => Err(ArchError::PatchTooLarge { extent, patch }),
            PatchPadding::Valid => Ok(extent / patch),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSignature {
    Image {
        height: u64,
        width: u64,
        channels: u64,
    },
    TokenSequence {
        length: u64,
        vocab: u64,
    },
}

/// One node of an architecture tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayerSpec {
    /// Non-overlapping patch projection of an image into a token stream.
    PatchEmbed {
        patch: u64,
        in_channels: u64,
        embed_dim: u64,
        add_cls_token: bool,
        positional: bool,
        #[serde(default, skip_serializing_if = "PatchPadding::is_exact")]
        padding: PatchPadding,
    },
    /// Multi-head attention with Q, K, V and output projections.
    Attention {
        model_dim: u64,
        qkv_dim: u64,
        num_heads: u64,
        #[serde(default)]
        is_causal: bool,
        #[serde(default)]
        cross_attention: bool,
        /// Key/value length for cross-attention; defaults to the memory stream.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kv_length: Option<u64>,
    },
    FeedForward {
        model_dim: u64,
        hidden_dim: u64,
        /// Fraction of zero weights; scales matmul FLOPs only.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight_sparsity: Option<f64>,
    },
    LayerNorm {
        model_dim: u64,
    },
    Dense {
        in_dim: u64,
        out_dim: u64,
        #[serde(default = "default_true")]
        bias: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight_sparsity: Option<f64>,
    },
    /// Token lookup table. The owning table also implies the output
    /// projection onto the vocabulary, applied to the final stream.
    TokenEmbedding {
        vocab: u64,
        embed_dim: u64,
        #[serde(default)]
        tied_output: bool,
        /// Starts a new token stream of this length; the previous stream
        /// becomes the cross-attention memory.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        length: Option<u64>,
        /// Reuse the first table in the spec instead of owning one.
        #[serde(default, skip_serializing_if = "is_false")]
        share_table: bool,
    },
    /// Linear head over the first (CLS) token.
    ClassifierHead {
        model_dim: u64,
        classes: u64,
    },
    #[serde(rename = "moe")]
    MoE {
        expert: Box<LayerSpec>,
        num_experts: u64,
        experts_per_token: u64,
        router_dim: u64,
    },
    Repeat {
        body: Vec<LayerSpec>,
        times: u64,
        share_params: bool,
    },
    /// Branches consume the same input and their outputs are summed.
    Parallel {
        branches: Vec<Vec<LayerSpec>>,
    },
}

impl LayerSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            LayerSpec::PatchEmbed { .. } => "patch_embed",
            LayerSpec::Attention { .. } => "attention",
            LayerSpec::FeedForward { .. } => "feed_forward",
            LayerSpec::LayerNorm { .. } => "layer_norm",
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::TokenEmbedding { .. } => "token_embedding",
            LayerSpec::ClassifierHead { .. } => "classifier_head",
            LayerSpec::MoE { .. } => "moe",
            LayerSpec::Repeat { .. } => "repeat",
            LayerSpec::Parallel { .. } => "parallel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ArchSpec {
    pub name: String,
    pub input: InputSignature,
    pub layers: Vec<LayerSpec>,
    #[serde(default = "default_element_bytes")]
    pub element_bytes: u32,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl ArchSpec {
    pub fn new(name: impl Into<String>, input: InputSignature, layers: Vec<LayerSpec>) -> Self {
        Self {
            name: name.into(),
            input,
            layers,
            element_bytes: DEFAULT_ELEMENT_BYTES,
            metadata: BTreeMap::new(),
        }
    }
}

/// Sequence length produced by a patch embedding on an image input.
pub fn derive_sequence_length(
    input: &InputSignature,
    patch: u64,
    add_cls: bool,
) -> Result<u64, ArchError> {
    derive_sequence_length_padded(input, patch, add_cls, PatchPadding::Exact)
}

pub fn derive_sequence_length_padded(
    input: &InputSignature,
    patch: u64,
    add_cls: bool,
    padding: PatchPadding,
) -> Result<u64, ArchError> {
    let InputSignature::Image { height, width, .. } = *input else {
        return Err(ArchError::NotAnImage);
    };
    let rows = padding.grid(height, patch)?;
    let cols = padding.grid(width, patch)?;
    rows.checked_mul(cols)
        .and_then(|n| n.checked_add(u64::from(add_cls)))
        .ok_or(ArchError::Overflow)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationResult {
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Activation stream seen by the validator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stream {
    Image { height: u64, width: u64, channels: u64 },
    /// `dim == None` means raw token ids (not yet embedded).
    Tokens { len: u64, dim: Option<u64> },
    /// Shape lost after an earlier violation; suppresses cascading reports.
    Unknown,
}

struct Validator {
    violations: Vec<Violation>,
    memory: Option<(u64, u64)>,
    tables: Vec<(u64, u64)>,
}

impl Validator {
    fn report(&mut self, path: &str, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn positive(&mut self, path: &str, fields: &[(&str, u64)]) -> bool {
        let mut ok = true;
        for (name, value) in fields {
            if *value == 0 {
                self.report(path, format!("{name} must be at least 1"));
                ok = false;
            }
        }
        ok
    }

    /// Checks a token layer's input and returns the model dim if the stream is usable.
    fn token_input(&mut self, path: &str, stream: Stream, expected_dim: u64) -> Option<u64> {
        match stream {
            Stream::Tokens { len, dim } => {
                if let Some(dim) = dim {
                    if dim != expected_dim {
                        self.report(
                            path,
                            format!("expects feature dim {expected_dim}, stream has {dim}"),
                        );
                        return None;
                    }
                }
                Some(len)
            }
            Stream::Image { .. } => {
                self.report(path, "expects a token stream, got an image");
                None
            }
            Stream::Unknown => None,
        }
    }

    fn check_elements(&mut self, path: &str, len: u64, dim: u64) -> Stream {
        if len.checked_mul(dim).is_none() {
            self.report(path, "activation element count overflows 64 bits");
            return Stream::Unknown;
        }
        Stream::Tokens {
            len,
            dim: Some(dim),
        }
    }

    fn sparsity(&mut self, path: &str, sparsity: Option<f64>) {
        if let Some(s) = sparsity {
            if !(0.0..1.0).contains(&s) {
                self.report(path, "weight_sparsity must lie in [0, 1)");
            }
        }
    }

    fn sequence(&mut self, path: &str, layers: &[LayerSpec], mut stream: Stream, depth: usize) -> Stream {
        for (i, layer) in layers.iter().enumerate() {
            stream = self.layer(&format!("{path}[{i}]"), layer, stream, depth);
        }
        stream
    }

    fn layer(&mut self, path: &str, layer: &LayerSpec, stream: Stream, depth: usize) -> Stream {
        match *layer {
            LayerSpec::PatchEmbed {
                patch,
                in_channels,
                embed_dim,
                add_cls_token,
                padding,
                ..
            } => {
                if !self.positive(
                    path,
                    &[("patch", patch), ("in_channels", in_channels), ("embed_dim", embed_dim)],
                ) {
                    return Stream::Unknown;
                }
                match stream {
                    Stream::Image {
                        height,
                        width,
                        channels,
                    } => {
                        if channels != in_channels {
                            self.report(
                                path,
                                format!("in_channels {in_channels} does not match image channels {channels}"),
                            );
                        }
                        let input = InputSignature::Image {
                            height,
                            width,
                            channels,
                        };
                        match derive_sequence_length_padded(&input, patch, add_cls_token, padding) {
                            Ok(len) => {
                                if len.checked_mul(patch.saturating_mul(patch)).is_none() {
                                    self.report(path, "patch arithmetic overflows 64 bits");
                                    return Stream::Unknown;
                                }
                                self.check_elements(path, len, embed_dim)
                            }
                            Err(ArchError::NotDivisible { extent, patch }) => {
                                self.report(
                                    path,
                                    format!("patch does not divide input extent ({patch} into {extent})"),
                                );
                                Stream::Unknown
                            }
                            Err(e) => {
                                self.report(path, e.to_string());
                                Stream::Unknown
                            }
                        }
                    }
                    Stream::Tokens { .. } => {
                        self.report(path, "patch embedding expects an image input");
                        Stream::Unknown
                    }
                    Stream::Unknown => Stream::Unknown,
                }
            }
            LayerSpec::Attention {
                model_dim,
                qkv_dim,
                num_heads,
                cross_attention,
                kv_length,
                ..
            } => {
                if !self.positive(
                    path,
                    &[("model_dim", model_dim), ("qkv_dim", qkv_dim), ("num_heads", num_heads)],
                ) {
                    return Stream::Unknown;
                }
                if qkv_dim % num_heads != 0 {
                    self.report(path, format!("num_heads {num_heads} does not divide qkv_dim {qkv_dim}"));
                }
                if kv_length == Some(0) {
                    self.report(path, "kv_length must be at least 1");
                }
                if kv_length.is_some() && !cross_attention {
                    self.report(path, "kv_length is only meaningful for cross-attention");
                }
                if cross_attention && kv_length.is_none() {
                    match self.memory {
                        None => self.report(path, "cross-attention without a memory stream"),
                        Some((_, dim)) if dim != model_dim => self.report(
                            path,
                            format!("memory stream dim {dim} does not match model_dim {model_dim}"),
                        ),
                        Some(_) => {}
                    }
                }
                match self.token_input(path, stream, model_dim) {
                    Some(len) => self.check_elements(path, len, model_dim),
                    None => Stream::Unknown,
                }
            }
            LayerSpec::FeedForward {
                model_dim,
                hidden_dim,
                weight_sparsity,
            } => {
                if !self.positive(path, &[("model_dim", model_dim), ("hidden_dim", hidden_dim)]) {
                    return Stream::Unknown;
                }
                self.sparsity(path, weight_sparsity);
                match self.token_input(path, stream, model_dim) {
                    Some(len) => {
                        if len.checked_mul(hidden_dim).is_none() {
                            self.report(path, "hidden activation overflows 64 bits");
                            return Stream::Unknown;
                        }
                        self.check_elements(path, len, model_dim)
                    }
                    None => Stream::Unknown,
                }
            }
            LayerSpec::LayerNorm { model_dim } => {
                if !self.positive(path, &[("model_dim", model_dim)]) {
                    return Stream::Unknown;
                }
                match self.token_input(path, stream, model_dim) {
                    Some(len) => self.check_elements(path, len, model_dim),
                    None => Stream::Unknown,
                }
            }
            LayerSpec::Dense {
                in_dim,
                out_dim,
                weight_sparsity,
                ..
            } => {
                if !self.positive(path, &[("in_dim", in_dim), ("out_dim", out_dim)]) {
                    return Stream::Unknown;
                }
                self.sparsity(path, weight_sparsity);
                match self.token_input(path, stream, in_dim) {
                    Some(len) => self.check_elements(path, len, out_dim),
                    None => Stream::Unknown,
                }
            }
            LayerSpec::TokenEmbedding {
                vocab,
                embed_dim,
                length,
                share_table,
                ..
            } => {
                if !self.positive(path, &[("vocab", vocab), ("embed_dim", embed_dim)]) {
                    return Stream::Unknown;
                }
                if length == Some(0) {
                    self.report(path, "length must be at least 1");
                    return Stream::Unknown;
                }
                if share_table {
                    if !self.tables.contains(&(vocab, embed_dim)) {
                        self.report(path, "share_table without an earlier table of the same vocab and dim");
                    }
                } else {
                    self.tables.push((vocab, embed_dim));
                }
                match stream {
                    Stream::Tokens { len, dim: None } => {
                        self.check_elements(path, length.unwrap_or(len), embed_dim)
                    }
                    Stream::Tokens {
                        len,
                        dim: Some(dim),
                    } => match length {
                        Some(new_len) => {
                            self.memory = Some((len, dim));
                            self.check_elements(path, new_len, embed_dim)
                        }
                        None => {
                            self.report(path, "token embedding over an embedded stream needs an explicit length");
                            Stream::Unknown
                        }
                    },
                    Stream::Image { .. } => {
                        self.report(path, "token embedding expects a token input");
                        Stream::Unknown
                    }
                    Stream::Unknown => Stream::Unknown,
                }
            }
            LayerSpec::ClassifierHead { model_dim, classes } => {
                if !self.positive(path, &[("model_dim", model_dim), ("classes", classes)]) {
                    return Stream::Unknown;
                }
                match self.token_input(path, stream, model_dim) {
                    Some(_) => Stream::Tokens {
                        len: 1,
                        dim: Some(classes),
                    },
                    None => Stream::Unknown,
                }
            }
            LayerSpec::MoE {
                ref expert,
                num_experts,
                experts_per_token,
                router_dim,
            } => {
                if !self.positive(
                    path,
                    &[
                        ("num_experts", num_experts),
                        ("experts_per_token", experts_per_token),
                        ("router_dim", router_dim),
                    ],
                ) {
                    return Stream::Unknown;
                }
                if experts_per_token > num_experts {
                    self.report(
                        path,
                        format!("experts_per_token {experts_per_token} exceeds num_experts {num_experts}"),
                    );
                }
                if depth + 1 > MAX_NESTING {
                    self.report(path, format!("nesting deeper than {MAX_NESTING}"));
                    return Stream::Unknown;
                }
                let Some(len) = self.token_input(path, stream, router_dim) else {
                    return Stream::Unknown;
                };
                let input = Stream::Tokens {
                    len,
                    dim: Some(router_dim),
                };
                let out = self.layer(&format!("{path}.expert"), expert, input, depth + 1);
                if out != input && out != Stream::Unknown {
                    self.report(path, "expert must preserve the token stream shape");
                }
                input
            }
            LayerSpec::Repeat {
                ref body,
                times,
                ..
            } => {
                if times == 0 {
                    self.report(path, "times must be at least 1");
                }
                if depth + 1 > MAX_NESTING {
                    self.report(path, format!("nesting deeper than {MAX_NESTING}"));
                    return Stream::Unknown;
                }
                let body_path = format!("{path}.body");
                let once = self.sequence(&body_path, body, stream, depth + 1);
                if times > 1 && once != Stream::Unknown {
                    // A repeated body must map its output back onto its input.
                    let twice = self.sequence_quiet(body, once, depth + 1);
                    if twice != once {
                        self.report(path, "repeated body does not preserve its input shape");
                        return Stream::Unknown;
                    }
                }
                once
            }
            LayerSpec::Parallel { ref branches } => {
                if branches.is_empty() {
                    self.report(path, "parallel needs at least one branch");
                    return Stream::Unknown;
                }
                if depth + 1 > MAX_NESTING {
                    self.report(path, format!("nesting deeper than {MAX_NESTING}"));
                    return Stream::Unknown;
                }
                let memory = self.memory;
                let mut outputs = Vec::with_capacity(branches.len());
                for (b, branch) in branches.iter().enumerate() {
                    self.memory = memory;
                    if branch.is_empty() {
                        self.report(&format!("{path}.branches[{b}]"), "branch is empty");
                        outputs.push(Stream::Unknown);
                        continue;
                    }
                    outputs.push(self.sequence(&format!("{path}.branches[{b}]"), branch, stream, depth + 1));
                }
                self.memory = memory;
                let first = outputs[0];
                if outputs.contains(&Stream::Unknown) {
                    return Stream::Unknown;
                }
                if outputs.iter().any(|o| *o != first) {
                    self.report(path, "parallel branches produce different output shapes");
                    return Stream::Unknown;
                }
                if matches!(first, Stream::Image { .. }) {
                    self.report(path, "parallel branches must produce token streams");
                    return Stream::Unknown;
                }
                first
            }
        }
    }

    /// Replays a sequence without recording violations (already reported once).
    fn sequence_quiet(&mut self, layers: &[LayerSpec], stream: Stream, depth: usize) -> Stream {
        let saved = (self.violations.len(), self.memory, self.tables.len());
        let out = self.sequence("", layers, stream, depth);
        self.violations.truncate(saved.0);
        self.memory = saved.1;
        self.tables.truncate(saved.2);
        out
    }
}

/// Checks every structural invariant of `spec`. Never panics.
pub fn validate(spec: &ArchSpec) -> ValidationResult {
    let mut v = Validator {
        violations: Vec::new(),
        memory: None,
        tables: Vec::new(),
    };
    if spec.element_bytes == 0 {
        v.report("element_bytes", "element_bytes must be at least 1");
    }
    let stream = match spec.input {
        InputSignature::Image {
            height,
            width,
            channels,
        } => {
            if v.positive("input", &[("height", height), ("width", width), ("channels", channels)]) {
                match height.checked_mul(width).and_then(|n| n.checked_mul(channels)) {
                    Some(_) => Stream::Image {
                        height,
                        width,
                        channels,
                    },
                    None => {
                        v.report("input", "image element count overflows 64 bits");
                        Stream::Unknown
                    }
                }
            } else {
                Stream::Unknown
            }
        }
        InputSignature::TokenSequence { length, vocab } => {
            if v.positive("input", &[("length", length), ("vocab", vocab)]) {
                Stream::Tokens {
                    len: length,
                    dim: None,
                }
            } else {
                Stream::Unknown
            }
        }
    };
    if spec.layers.is_empty() {
        v.report("layers", "spec has no layers");
    }
    let out = v.sequence("layers", &spec.layers, stream, 0);
    let ends_with_head = matches!(spec.layers.last(), Some(LayerSpec::ClassifierHead { .. }));
    if let (Some(&(_, table_dim)), false) = (v.tables.first(), ends_with_head) {
        // The owning table also projects the final stream back onto the vocabulary.
        if let Stream::Tokens { dim: Some(dim), .. } = out {
            if dim != table_dim {
                v.report(
                    "layers",
                    format!("final stream dim {dim} does not match output projection dim {table_dim}"),
                );
            }
        }
    }
    ValidationResult {
        violations: v.violations,
    }
}
