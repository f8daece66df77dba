//! Builders for the transformer families used in comparisons: ViT, a
//! depth-shared (universal) variant, a mixture-of-experts variant and
//! encoder-decoder / decoder-only language models.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archspec::{validate, ArchSpec, InputSignature, LayerSpec, PatchPadding, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("built spec failed validation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, BuildError> {
    Err(BuildError::Config(msg.into()))
}

fn checked(spec: ArchSpec) -> Result<ArchSpec, BuildError> {
    let result = validate(&spec);
    if result.is_ok() {
        Ok(spec)
    } else {
        Err(BuildError::Invalid(result.violations))
    }
}

fn default_classes() -> u64 {
    1000
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct VitConfig {
    pub patch: u64,
    pub depth: u64,
    pub model_dim: u64,
    pub num_heads: u64,
    pub ffn_dim: u64,
    pub image_height: u64,
    pub image_width: u64,
    pub channels: u64,
    #[serde(default = "default_classes")]
    pub classes: u64,
    #[serde(default)]
    pub patch_padding: PatchPadding,
}

impl VitConfig {
    /// ViT-Base (12 layers, width 768, 12 heads, FFN 3072) on 224×224×3
    /// images with 1000 classes. A patch that does not divide 224 drops the
    /// border remainder, like a VALID strided convolution.
    pub fn base(patch: u64) -> Self {
        let padding = if patch > 0 && 224 % patch != 0 {
            PatchPadding::Valid
        } else {
            PatchPadding::Exact
        };
        Self {
            patch,
            depth: 12,
            model_dim: 768,
            num_heads: 12,
            ffn_dim: 3072,
            image_height: 224,
            image_width: 224,
            channels: 3,
            classes: 1000,
            patch_padding: padding,
        }
    }

    fn check(&self) -> Result<(), BuildError> {
        if self.depth == 0 {
            return config_err("depth must be at least 1");
        }
        if self.num_heads == 0 || !self.model_dim.is_multiple_of(self.num_heads) {
            return config_err(format!(
                "num_heads {} must divide model_dim {}",
                self.num_heads, self.model_dim
            ));
        }
        if self.patch == 0 {
            return config_err("patch must be at least 1");
        }
        if self.patch_padding == PatchPadding::Exact
            && (!self.image_height.is_multiple_of(self.patch) || !self.image_width.is_multiple_of(self.patch))
        {
            return config_err(format!(
                "patch {} must divide image {}x{}",
                self.patch, self.image_height, self.image_width
            ));
        }
        Ok(())
    }

    fn input(&self) -> InputSignature {
        InputSignature::Image {
            height: self.image_height,
            width: self.image_width,
            channels: self.channels,
        }
    }

    fn patch_embed(&self) -> LayerSpec {
        LayerSpec::PatchEmbed {
            patch: self.patch,
            in_channels: self.channels,
            embed_dim: self.model_dim,
            add_cls_token: true,
            positional: true,
            padding: self.patch_padding,
        }
    }

    fn block(&self, ffn: LayerSpec) -> Vec<LayerSpec> {
        let d = self.model_dim;
        vec![
            LayerSpec::LayerNorm { model_dim: d },
            LayerSpec::Attention {
                model_dim: d,
                qkv_dim: d,
                num_heads: self.num_heads,
                is_causal: false,
                cross_attention: false,
                kv_length: None,
            },
            LayerSpec::LayerNorm { model_dim: d },
            ffn,
        ]
    }

    fn ffn(&self) -> LayerSpec {
        LayerSpec::FeedForward {
            model_dim: self.model_dim,
            hidden_dim: self.ffn_dim,
            weight_sparsity: None,
        }
    }

    fn assemble(&self, name: String, stack: LayerSpec) -> ArchSpec {
        ArchSpec::new(
            name,
            self.input(),
            vec![
                self.patch_embed(),
                stack,
                LayerSpec::LayerNorm {
                    model_dim: self.model_dim,
                },
                LayerSpec::ClassifierHead {
                    model_dim: self.model_dim,
                    classes: self.classes,
                },
            ],
        )
    }
}

/// Patch embedding, `depth` unshared encoder blocks, final norm and head.
pub fn build_vit(cfg: &VitConfig) -> Result<ArchSpec, BuildError> {
    cfg.check()?;
    let stack = LayerSpec::Repeat {
        body: cfg.block(cfg.ffn()),
        times: cfg.depth,
        share_params: false,
    };
    checked(cfg.assemble(format!("vit-d{}-p{}", cfg.model_dim, cfg.patch), stack))
}

/// The ViT stack with one block's parameters reused for `steps` iterations.
/// `cfg.depth` is ignored.
pub fn build_universal_transformer(cfg: &VitConfig, steps: u64) -> Result<ArchSpec, BuildError> {
    if steps == 0 {
        return config_err("steps must be at least 1");
    }
    let cfg = VitConfig {
        depth: steps,
        ..cfg.clone()
    };
    cfg.check()?;
    let stack = LayerSpec::Repeat {
        body: cfg.block(cfg.ffn()),
        times: steps,
        share_params: true,
    };
    checked(cfg.assemble(
        format!("ut-d{}-p{}-x{steps}", cfg.model_dim, cfg.patch),
        stack,
    ))
}

/// Replaces every `moe_every`-th feed-forward block with a routed mixture
/// of `num_experts` copies, `experts_per_token` of which run per token.
pub fn build_moe_transformer(
    cfg: &VitConfig,
    num_experts: u64,
    experts_per_token: u64,
    moe_every: u64,
) -> Result<ArchSpec, BuildError> {
    cfg.check()?;
    if experts_per_token == 0 || experts_per_token > num_experts {
        return config_err(format!(
            "experts_per_token {experts_per_token} must lie in 1..={num_experts}"
        ));
    }
    if moe_every == 0 || !cfg.depth.is_multiple_of(moe_every) {
        return config_err(format!(
            "moe_every {moe_every} must divide depth {}",
            cfg.depth
        ));
    }
    let moe = LayerSpec::MoE {
        expert: Box::new(cfg.ffn()),
        num_experts,
        experts_per_token,
        router_dim: cfg.model_dim,
    };
    let mut body = Vec::new();
    for _ in 1..moe_every {
        body.extend(cfg.block(cfg.ffn()));
    }
    body.extend(cfg.block(moe));
    let stack = LayerSpec::Repeat {
        body,
        times: cfg.depth / moe_every,
        share_params: false,
    };
    checked(cfg.assemble(
        format!("moe-d{}-p{}-e{num_experts}k{experts_per_token}", cfg.model_dim, cfg.patch),
        stack,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Arrangement {
    DecoderOnly,
    EncoderDecoder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LmConfig {
    pub arrangement: Arrangement,
    /// Layers per stack; a decoder-only model gets twice this many.
    pub layers_per_stack: u64,
    pub model_dim: u64,
    pub ffn_dim: u64,
    pub heads: u64,
    pub vocab: u64,
    pub input_length: u64,
    pub output_length: u64,
}

impl LmConfig {
    fn check(&self) -> Result<(), BuildError> {
        if self.layers_per_stack == 0 {
            return config_err("layers_per_stack must be at least 1");
        }
        if self.heads == 0 || !self.model_dim.is_multiple_of(self.heads) {
            return config_err(format!(
                "heads {} must divide model_dim {}",
                self.heads, self.model_dim
            ));
        }
        if self.input_length == 0 || self.output_length == 0 {
            return config_err("input and output lengths must be at least 1");
        }
        Ok(())
    }

    fn attention(&self, is_causal: bool, cross_attention: bool) -> LayerSpec {
        LayerSpec::Attention {
            model_dim: self.model_dim,
            qkv_dim: self.model_dim,
            num_heads: self.heads,
            is_causal,
            cross_attention,
            kv_length: None,
        }
    }

    fn norm(&self) -> LayerSpec {
        LayerSpec::LayerNorm {
            model_dim: self.model_dim,
        }
    }

    fn ffn(&self) -> LayerSpec {
        LayerSpec::FeedForward {
            model_dim: self.model_dim,
            hidden_dim: self.ffn_dim,
            weight_sparsity: None,
        }
    }

    fn embedding(&self, length: Option<u64>, share_table: bool) -> LayerSpec {
        LayerSpec::TokenEmbedding {
            vocab: self.vocab,
            embed_dim: self.model_dim,
            tied_output: true,
            length,
            share_table,
        }
    }
}

/// Decoder-only: `2L` causal blocks over input and output tokens together.
/// Encoder-decoder: `L` encoder blocks over the input, then `L` decoder
/// blocks with cross-attention over the output. Embeddings are tied and
/// shared between the two stacks.
pub fn build_lm(cfg: &LmConfig) -> Result<ArchSpec, BuildError> {
    cfg.check()?;
    let l = cfg.layers_per_stack;
    let spec = match cfg.arrangement {
        Arrangement::DecoderOnly => {
            let length = cfg.input_length + cfg.output_length;
            ArchSpec::new(
                format!("decoder-only-{}x{}", 2 * l, cfg.model_dim),
                InputSignature::TokenSequence {
                    length,
                    vocab: cfg.vocab,
                },
                vec![
                    cfg.embedding(None, false),
                    LayerSpec::Repeat {
                        body: vec![cfg.norm(), cfg.attention(true, false), cfg.norm(), cfg.ffn()],
                        times: 2 * l,
                        share_params: false,
                    },
                    cfg.norm(),
                ],
            )
        }
        Arrangement::EncoderDecoder => ArchSpec::new(
            format!("encoder-decoder-{l}+{l}x{}", cfg.model_dim),
            InputSignature::TokenSequence {
                length: cfg.input_length,
                vocab: cfg.vocab,
            },
            vec![
                cfg.embedding(None, false),
                LayerSpec::Repeat {
                    body: vec![cfg.norm(), cfg.attention(false, false), cfg.norm(), cfg.ffn()],
                    times: l,
                    share_params: false,
                },
                cfg.norm(),
                cfg.embedding(Some(cfg.output_length), true),
                LayerSpec::Repeat {
                    body: vec![
                        cfg.norm(),
                        cfg.attention(true, false),
                        cfg.norm(),
                        cfg.attention(false, true),
                        cfg.norm(),
                        cfg.ffn(),
                    ],
                    times: l,
                    share_params: false,
                },
                cfg.norm(),
            ],
        ),
    };
    checked(spec)
}
