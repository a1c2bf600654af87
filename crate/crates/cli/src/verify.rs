//! Built-in verification suite: fast end-to-end checks of the library's
//! load-bearing identities. Exit code 0 when everything passes, 2 otherwise.

use sparse_polar::channels::rational;
use sparse_polar::construct::bec_reliabilities;
use sparse_polar::drs::{self, GammaMethod};
use sparse_polar::graph::{adrs_extra_channel_uses, split_plan, EncoderGraph};
use sparse_polar::kernel::{kron_power, BitMatrix, BitVector};
use std::process::ExitCode;

pub fn run() -> ExitCode {
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool| {
        println!("{:<40} {}", name, if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    check("split worked example", split_worked_example());
    check("split matrix 8x9", split_matrix_example());
    check("gamma dual methods (n <= 8)", gamma_dual());
    check("erasure dominance (n <= 8)", dominance());
    check("four-symbol channel values", remark3());
    check("graph equals matrix (n <= 5)", graph_matrix());
    check("augmented channel-use counts", adrs_counts());

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn split_worked_example() -> bool {
    let v = BitVector::from_bits(&[0, 0, 0, 0, 1, 1, 1, 1]);
    match drs::split(&v, 2) {
        Ok(out) => {
            out.pieces
                == vec![
                    BitVector::from_bits(&[0, 0, 0, 0, 0, 0, 1, 1]),
                    BitVector::from_bits(&[0, 0, 0, 0, 1, 1, 0, 0]),
                ]
        }
        Err(_) => false,
    }
}

fn split_matrix_example() -> bool {
    let g = kron_power(&BitMatrix::g2(), 3);
    match drs::split_matrix(&g, 4) {
        Ok(m) => m.rows() == 8 && m.cols() == 9,
        Err(_) => false,
    }
}

fn gamma_dual() -> bool {
    for n in 1..=8usize {
        for wexp in 0..=n {
            let a = drs::gamma(n, 1 << wexp, GammaMethod::ClosedForm);
            let b = drs::gamma(n, 1 << wexp, GammaMethod::ExactSplit);
            match (a, b) {
                (Ok(a), Ok(b)) if a.total_columns == b.total_columns => {}
                _ => return false,
            }
        }
    }
    true
}

fn dominance() -> bool {
    for n in 1..=8usize {
        let std_g = EncoderGraph::standard(n);
        for eps in [0.1, 0.5, 0.9] {
            let std_t = match bec_reliabilities(&std_g, eps) {
                Ok(t) => t,
                Err(_) => return false,
            };
            for wexp in 0..=n {
                let g = EncoderGraph::drs(n, 1 << wexp);
                let t = match bec_reliabilities(&g, eps) {
                    Ok(t) => t,
                    Err(_) => return false,
                };
                for i in 0..(1usize << n) {
                    if t.values[i] > std_t.values[i] + 1e-12 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn remark3() -> bool {
    let round4 = |x: f64| (x * 1e4).round() / 1e4;
    let (w1, w2) = rational::remark3_pair();
    round4(w1.bhattacharyya()) == 0.7666
        && round4(w2.bhattacharyya()) == 0.7702
        && round4(rational::transform_minus(&w1, &w2).bhattacharyya()) == 0.9147
        && round4(rational::transform_plus(&w1, &w2).bhattacharyya()) == 0.5904
        && round4(rational::transform_minus(&w2, &w2).bhattacharyya()) == 0.9137
        && round4(rational::transform_plus(&w2, &w2).bhattacharyya()) == 0.5932
}

fn graph_matrix() -> bool {
    for n in 1..=5usize {
        for wexp in 0..=n {
            let g = EncoderGraph::drs(n, 1 << wexp);
            let want = match drs::split_matrix(&kron_power(&BitMatrix::g2(), n), 1 << wexp) {
                Ok(m) => m,
                Err(_) => return false,
            };
            if g.generator_matrix() != want {
                return false;
            }
        }
    }
    true
}

fn adrs_counts() -> bool {
    if EncoderGraph::adrs(3, 2, 0).channel_uses() != 22 {
        return false;
    }
    for n in 1..=6usize {
        for wexp in 0..=n {
            let g = EncoderGraph::adrs(n, 1 << wexp, 0);
            let plan = split_plan(n, 1 << wexp);
            let want = (1u128 << n) + plan.extra_channel_uses();
            if g.channel_uses() as u128 != want
                || adrs_extra_channel_uses(n, 1 << wexp) != plan.extra_channel_uses()
            {
                return false;
            }
        }
    }
    true
}
