//! Per-layer cost extraction.
//!
//! [`CostTree::build`] walks a validated [`ArchSpec`] once and records, for
//! every leaf block, its parameter count and per-example work and tensor
//! sizes. The tree keeps the `Repeat`/`Parallel` structure so that sharing,
//! repetition and branch concurrency can be folded differently by each
//! indicator.

use crate::archspec::{validate, ArchSpec, InputSignature, LayerSpec};
use crate::error::IndicatorError;

/// Elementwise cost constants (operations per element).
pub const SOFTMAX_OPS: u64 = 5;
pub const LAYERNORM_OPS: u64 = 5;
pub const GELU_OPS: u64 = 4;
pub const ADD_OPS: u64 = 1;

pub(crate) fn mul(a: u64, b: u64) -> Result<u64, IndicatorError> {
    a.checked_mul(b).ok_or(IndicatorError::Overflow)
}

pub(crate) fn add(a: u64, b: u64) -> Result<u64, IndicatorError> {
    a.checked_add(b).ok_or(IndicatorError::Overflow)
}

fn sum(values: &[u64]) -> Result<u64, IndicatorError> {
    values.iter().try_fold(0u64, |acc, &v| add(acc, v))
}

fn sparse(macs: u64, sparsity: Option<f64>) -> u64 {
    match sparsity {
        Some(s) if s > 0.0 => (macs as f64 * (1.0 - s)).round() as u64,
        _ => macs,
    }
}

/// Costs of one execution of a leaf block, for a single example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LeafCost {
    pub path: String,
    pub kind: &'static str,
    /// Parameters owned by the block (one copy).
    pub params: u64,
    /// Parameter elements read per execution.
    pub params_read: u64,
    /// Multiply-accumulates.
    pub macs: u64,
    /// Non-matmul elementwise operations.
    pub elementwise: u64,
    pub input_elems: u64,
    pub output_elems: u64,
}

impl LeafCost {
    pub fn flops(&self) -> Result<u64, IndicatorError> {
        add(mul(self.macs, 2)?, self.elementwise)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum CostNode {
    Leaf(LeafCost),
    Repeat {
        body: Vec<CostNode>,
        times: u64,
        shared: bool,
    },
    Parallel {
        branches: Vec<Vec<CostNode>>,
        /// Summation of branch outputs; absent for a single branch.
        merge: Option<LeafCost>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct CostTree {
    pub nodes: Vec<CostNode>,
    pub element_bytes: u64,
}

#[derive(Debug, Clone, Copy)]
struct Stream {
    len: u64,
    dim: u64,
    /// Raw image elements before a patch embedding.
    image: Option<(u64, u64, u64)>,
}

struct Walker {
    pad: Option<u64>,
    memory: Option<(u64, u64)>,
    head: Option<(u64, u64)>,
}

impl Walker {
    fn pad(&self, len: u64) -> Result<u64, IndicatorError> {
        match self.pad {
            Some(m) if m > 1 => mul(len.div_ceil(m), m),
            _ => Ok(len),
        }
    }

    fn sequence(
        &mut self,
        path: &str,
        layers: &[LayerSpec],
        mut stream: Stream,
    ) -> Result<(Vec<CostNode>, Stream), IndicatorError> {
        let mut nodes = Vec::with_capacity(layers.len());
        for (i, layer) in layers.iter().enumerate() {
            let (node, next) = self.layer(format!("{path}[{i}]"), layer, stream)?;
            nodes.push(node);
            stream = next;
        }
        Ok((nodes, stream))
    }

    fn layer(
        &mut self,
        path: String,
        layer: &LayerSpec,
        s: Stream,
    ) -> Result<(CostNode, Stream), IndicatorError> {
        let kind = layer.kind_name();
        let leaf = |params, params_read, macs, elementwise, input_elems, output_elems| LeafCost {
            path: path.clone(),
            kind,
            params,
            params_read,
            macs,
            elementwise,
            input_elems,
            output_elems,
        };
        let tokens = |len, dim| Stream {
            len,
            dim,
            image: None,
        };
        let l = s.len;
        match *layer {
            LayerSpec::PatchEmbed {
                patch,
                in_channels,
                embed_dim: d,
                add_cls_token,
                positional,
                padding,
            } => {
                let (h, w, c) = s.image.ok_or(IndicatorError::Shape(path.clone()))?;
                let grid = mul(padding.grid(h, patch)?, padding.grid(w, patch)?)?;
                let seq = add(grid, u64::from(add_cls_token))?;
                let padded = self.pad(seq)?;
                let patch_in = mul(mul(patch, patch)?, in_channels)?;
                let params = sum(&[
                    mul(patch_in, d)?,
                    d,
                    if add_cls_token { d } else { 0 },
                    if positional { mul(seq, d)? } else { 0 },
                ])?;
                let macs = mul(mul(grid, patch_in)?, d)?;
                let elementwise = add(
                    mul(grid, d)?,
                    if positional { mul(padded, d)? } else { 0 },
                )?;
                let input = mul(mul(h, w)?, c)?;
                let out = mul(padded, d)?;
                Ok((
                    CostNode::Leaf(leaf(params, params, macs, elementwise, input, out)),
                    tokens(padded, d),
                ))
            }
            LayerSpec::Attention {
                model_dim: d,
                qkv_dim: q,
                num_heads: h,
                cross_attention,
                kv_length,
                ..
            } => {
                let kv = if cross_attention {
                    match kv_length {
                        Some(n) => self.pad(n)?,
                        None => self.memory.ok_or(IndicatorError::Shape(path.clone()))?.0,
                    }
                } else {
                    l
                };
                let params = sum(&[mul(mul(4, d)?, q)?, mul(3, q)?, d])?;
                let dq = mul(d, q)?;
                let scores = mul(l, kv)?;
                let macs = sum(&[
                    mul(l, dq)?,
                    mul(mul(2, kv)?, dq)?,
                    mul(l, dq)?,
                    mul(mul(2, scores)?, q)?,
                ])?;
                let elementwise = sum(&[
                    mul(l, q)?,
                    mul(mul(2, kv)?, q)?,
                    mul(l, d)?,
                    mul(mul(SOFTMAX_OPS, h)?, scores)?,
                    mul(ADD_OPS, mul(l, d)?)?,
                ])?;
                let input = add(mul(l, d)?, if cross_attention { mul(kv, d)? } else { 0 })?;
                let out = mul(l, d)?;
                Ok((
                    CostNode::Leaf(leaf(params, params, macs, elementwise, input, out)),
                    tokens(l, d),
                ))
            }
            LayerSpec::FeedForward {
                model_dim: d,
                hidden_dim: f,
                weight_sparsity,
            } => {
                let params = sum(&[mul(mul(2, d)?, f)?, f, d])?;
                let macs = sparse(mul(mul(mul(2, l)?, d)?, f)?, weight_sparsity);
                let lf = mul(l, f)?;
                let ld = mul(l, d)?;
                let elementwise = sum(&[lf, ld, mul(GELU_OPS, lf)?, mul(ADD_OPS, ld)?])?;
                Ok((
                    CostNode::Leaf(leaf(params, params, macs, elementwise, ld, ld)),
                    tokens(l, d),
                ))
            }
            LayerSpec::LayerNorm { model_dim: d } => {
                let ld = mul(l, d)?;
                let params = mul(2, d)?;
                Ok((
                    CostNode::Leaf(leaf(params, params, 0, mul(LAYERNORM_OPS, ld)?, ld, ld)),
                    tokens(l, d),
                ))
            }
            LayerSpec::Dense {
                in_dim,
                out_dim,
                bias,
                weight_sparsity,
            } => {
                let params = add(mul(in_dim, out_dim)?, if bias { out_dim } else { 0 })?;
                let macs = sparse(mul(mul(l, in_dim)?, out_dim)?, weight_sparsity);
                let out = mul(l, out_dim)?;
                let elementwise = if bias { out } else { 0 };
                Ok((
                    CostNode::Leaf(leaf(params, params, macs, elementwise, mul(l, in_dim)?, out)),
                    tokens(l, out_dim),
                ))
            }
            LayerSpec::TokenEmbedding {
                vocab,
                embed_dim: d,
                tied_output,
                length,
                share_table,
            } => {
                let table = mul(vocab, d)?;
                let params = if share_table {
                    0
                } else {
                    if self.head.is_none() {
                        self.head = Some((vocab, d));
                    }
                    if tied_output {
                        table
                    } else {
                        mul(2, table)?
                    }
                };
                // A second embedding starts a new stream; the old one becomes memory.
                let new_len = match length {
                    Some(n) => {
                        if s.image.is_none() && s.dim > 0 {
                            self.memory = Some((s.len, s.dim));
                        }
                        self.pad(n)?
                    }
                    None => self.pad(l)?,
                };
                let out = mul(new_len, d)?;
                Ok((
                    CostNode::Leaf(leaf(params, table, 0, 0, new_len, out)),
                    tokens(new_len, d),
                ))
            }
            LayerSpec::ClassifierHead { model_dim: d, classes: k } => {
                let params = add(mul(d, k)?, k)?;
                Ok((
                    CostNode::Leaf(leaf(params, params, mul(d, k)?, k, d, k)),
                    tokens(1, k),
                ))
            }
            LayerSpec::MoE {
                ref expert,
                num_experts: e,
                experts_per_token: k,
                router_dim: d,
            } => {
                let saved_head = self.head;
                let (expert_node, _) = self.layer(format!("{path}.expert"), expert, s)?;
                self.head = saved_head;
                let expert_nodes = [expert_node];
                let expert_params = params_total(&expert_nodes)?;
                let expert_macs = fold_work(&expert_nodes, |c| Ok(c.macs))?;
                let expert_elementwise = fold_work(&expert_nodes, |c| Ok(c.elementwise))?;
                let router = mul(d, e)?;
                let params = add(router, mul(e, expert_params)?)?;
                let ld = mul(l, d)?;
                let macs = add(mul(l, router)?, mul(k, expert_macs)?)?;
                let elementwise = sum(&[
                    mul(mul(SOFTMAX_OPS, l)?, e)?,
                    mul(k, expert_elementwise)?,
                    mul(mul(2, k)?, ld)?,
                ])?;
                Ok((
                    CostNode::Leaf(leaf(params, params, macs, elementwise, ld, ld)),
                    tokens(l, d),
                ))
            }
            LayerSpec::Repeat {
                ref body,
                times,
                share_params,
            } => {
                let (nodes, out) = self.sequence(&format!("{path}.body"), body, s)?;
                Ok((
                    CostNode::Repeat {
                        body: nodes,
                        times,
                        shared: share_params,
                    },
                    out,
                ))
            }
            LayerSpec::Parallel { ref branches } => {
                let memory = self.memory;
                let mut built = Vec::with_capacity(branches.len());
                let mut out = s;
                for (b, branch) in branches.iter().enumerate() {
                    self.memory = memory;
                    let (nodes, o) = self.sequence(&format!("{path}.branches[{b}]"), branch, s)?;
                    built.push(nodes);
                    out = o;
                }
                let n = branches.len() as u64;
                let merge = if n > 1 {
                    let elems = mul(out.len, out.dim)?;
                    Some(LeafCost {
                        path: format!("{path}.merge"),
                        kind: "merge",
                        params: 0,
                        params_read: 0,
                        macs: 0,
                        elementwise: mul(n - 1, elems)?,
                        input_elems: mul(n, elems)?,
                        output_elems: elems,
                    })
                } else {
                    None
                };
                Ok((
                    CostNode::Parallel {
                        branches: built,
                        merge,
                    },
                    out,
                ))
            }
        }
    }
}

impl CostTree {
    /// Builds the tree for a valid spec. `pad` rounds every token stream length
    /// up to a multiple (hardware length padding).
    pub fn build(spec: &ArchSpec, pad: Option<u64>) -> Result<Self, IndicatorError> {
        let validation = validate(spec);
        if !validation.is_ok() {
            return Err(IndicatorError::Invalid(validation.violations));
        }
        let stream = match spec.input {
            InputSignature::Image {
                height,
                width,
                channels,
            } => Stream {
                len: 0,
                dim: 0,
                image: Some((height, width, channels)),
            },
            InputSignature::TokenSequence { length, .. } => Stream {
                len: length,
                dim: 0,
                image: None,
            },
        };
        let mut walker = Walker {
            pad,
            memory: None,
            head: None,
        };
        let (mut nodes, last) = walker.sequence("layers", &spec.layers, stream)?;
        let ends_with_head = matches!(spec.layers.last(), Some(LayerSpec::ClassifierHead { .. }));
        if let (Some((vocab, d)), false) = (walker.head, ends_with_head) {
            let table = mul(vocab, d)?;
            nodes.push(CostNode::Leaf(LeafCost {
                path: "lm_head".to_string(),
                kind: "lm_head",
                params: 0,
                params_read: table,
                macs: mul(last.len, table)?,
                elementwise: 0,
                input_elems: mul(last.len, d)?,
                output_elems: mul(last.len, vocab)?,
            }));
        }
        Ok(Self {
            nodes,
            element_bytes: u64::from(spec.element_bytes),
        })
    }

    /// Visits every leaf with its execution count and parameter multiplicity.
    pub fn for_each_leaf<F>(&self, mut f: F) -> Result<(), IndicatorError>
    where
        F: FnMut(&LeafCost, u64, u64) -> Result<(), IndicatorError>,
    {
        fn visit<F>(nodes: &[CostNode], runs: u64, copies: u64, f: &mut F) -> Result<(), IndicatorError>
        where
            F: FnMut(&LeafCost, u64, u64) -> Result<(), IndicatorError>,
        {
            for node in nodes {
                match node {
                    CostNode::Leaf(c) => f(c, runs, copies)?,
                    CostNode::Repeat {
                        body,
                        times,
                        shared,
                    } => {
                        let copies = if *shared { copies } else { mul(copies, *times)? };
                        visit(body, mul(runs, *times)?, copies, f)?;
                    }
                    CostNode::Parallel { branches, merge } => {
                        for branch in branches {
                            visit(branch, runs, copies, f)?;
                        }
                        if let Some(m) = merge {
                            f(m, runs, copies)?;
                        }
                    }
                }
            }
            Ok(())
        }
        visit(&self.nodes, 1, 1, &mut f)
    }
}

/// Parameter total with shared repeats counted once.
pub(crate) fn params_total(nodes: &[CostNode]) -> Result<u64, IndicatorError> {
    let mut total = 0u64;
    for node in nodes {
        let p = match node {
            CostNode::Leaf(c) => c.params,
            CostNode::Repeat {
                body,
                times,
                shared,
            } => {
                let once = params_total(body)?;
                if *shared {
                    once
                } else {
                    mul(once, *times)?
                }
            }
            CostNode::Parallel { branches, .. } => {
                let mut s = 0u64;
                for b in branches {
                    s = add(s, params_total(b)?)?;
                }
                s
            }
        };
        total = add(total, p)?;
    }
    Ok(total)
}

/// Sum of a per-execution quantity over every execution of every leaf.
pub(crate) fn fold_work<F>(nodes: &[CostNode], per_leaf: F) -> Result<u64, IndicatorError>
where
    F: Fn(&LeafCost) -> Result<u64, IndicatorError> + Copy,
{
    let mut total = 0u64;
    for node in nodes {
        let w = match node {
            CostNode::Leaf(c) => per_leaf(c)?,
            CostNode::Repeat { body, times, .. } => mul(fold_work(body, per_leaf)?, *times)?,
            CostNode::Parallel { branches, merge } => {
                let mut s = match merge {
                    Some(m) => per_leaf(m)?,
                    None => 0,
                };
                for b in branches {
                    s = add(s, fold_work(b, per_leaf)?)?;
                }
                s
            }
        };
        total = add(total, w)?;
    }
    Ok(total)
}
