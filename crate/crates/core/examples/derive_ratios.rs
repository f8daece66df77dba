//! Prints the derived values the acceptance tolerances are checked against:
//! ViT-Base parameter and multiply-accumulate counts per patch size, and the
//! encoder-decoder / decoder-only parameter and FLOPs ratios.

use costlens_core::archlib::{build_lm, build_vit, Arrangement, LmConfig, VitConfig};
use costlens_core::indicators::{count_flops, count_params};

fn main() {
    println!("ViT-Base on 224x224x3, 1000 classes");
    println!("{:>6} {:>14} {:>10} {:>10}", "patch", "params", "GMACs", "GFLOPs");
    for patch in [8, 16, 32, 64] {
        let spec = build_vit(&VitConfig::base(patch)).expect("valid config");
        let params = count_params(&spec).expect("params").total;
        let flops = count_flops(&spec, 1).expect("flops");
        println!(
            "{patch:>6} {params:>14} {:>10.4} {:>10.4}",
            flops.gmacs(),
            flops.gflops()
        );
    }

    println!();
    println!("encoder-decoder(L) vs decoder-only(2L), d=512 ffn=2048 heads=8 vocab=32128, 512+512 tokens");
    println!("{:>4} {:>12} {:>12}", "L", "param ratio", "flops ratio");
    for layers in [2, 6, 12] {
        let cfg = |arrangement| LmConfig {
            arrangement,
            layers_per_stack: layers,
            model_dim: 512,
            ffn_dim: 2048,
            heads: 8,
            vocab: 32128,
            input_length: 512,
            output_length: 512,
        };
        let enc_dec = build_lm(&cfg(Arrangement::EncoderDecoder)).expect("valid");
        let dec_only = build_lm(&cfg(Arrangement::DecoderOnly)).expect("valid");
        let p = |s| count_params(s).expect("params").total as f64;
        let f = |s| count_flops(s, 1).expect("flops").flops as f64;
        println!(
            "{layers:>4} {:>12.6} {:>12.6}",
            p(&enc_dec) / p(&dec_only),
            f(&enc_dec) / f(&dec_only)
        );
    }
}
