//! CPLEX LP-format export of a winner determination problem.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::encoding::Encoding;
use super::WdpProblem;
use crate::bundle::{bit_iter, mask};
use crate::{Error, Result};

fn term(out: &mut String, coef: f64, var: &str) {
    if coef == 0.0 {
        return;
    }
    let sign = if coef < 0.0 { '-' } else { '+' };
    let _ = write!(out, " {sign} {} {var}", libm::fabs(coef));
}

/// Writes the problem as a mixed-integer program in LP format: binary
/// `a_i_j` assignment variables, `z_i_k_t` indicators for kernel terms,
/// one capacity row per item and one integer cut per exclusion. Clamping of
/// oracle 2-wise values at zero is not representable and is omitted.
pub fn to_lp_format(p: &WdpProblem) -> Result<String> {
    p.validate()?;
    let m = p.models.m();
    let avail = mask(m) & !p.blocked;
    let members: Vec<usize> = p.economy.members().collect();
    let a = |i: usize, j: usize| alloc::format!("a_{i}_{j}");
    let mut obj = String::new();
    let mut quad = String::new();
    let mut rows = String::new();
    let mut binaries: Vec<String> = Vec::new();
    let mut row_id = 0usize;
    let mut next_row = |rows: &mut String, name: &str| {
        row_id += 1;
        let _ = write!(rows, " {name}{row_id}:");
    };

    for &i in &members {
        for j in bit_iter(avail) {
            binaries.push(a(i, j));
        }
        match &p.models.encodings()[i] {
            Encoding::Linear(w) => {
                for j in bit_iter(avail) {
                    term(&mut obj, w[j], &a(i, j));
                }
            }
            Encoding::Quadratic { form, .. } => {
                for j in bit_iter(avail) {
                    term(&mut obj, form.linear[j], &a(i, j));
                    for k in bit_iter(avail & !((2u64 << j) - 1)) {
                        let q = form.pair(j, k);
                        if q != 0.0 {
                            let sign = if q < 0.0 { '-' } else { '+' };
                            let _ = write!(quad, " {sign} {} {} * {}", 2.0 * libm::fabs(q), a(i, j), a(i, k));
                        }
                    }
                }
            }
            Encoding::Kernel(t) => {
                for k in 0..t.svs.len() {
                    let x = t.svs[k];
                    let z = |tau: u32| alloc::format!("z_{i}_{k}_{tau}");
                    for tau in 0..=t.tau_max(k) {
                        binaries.push(z(tau));
                        term(&mut obj, t.coeffs[k] * t.profile[tau as usize], &z(tau));
                    }
                    next_row(&mut rows, "simplex");
                    for tau in 0..=t.tau_max(k) {
                        term(&mut rows, 1.0, &z(tau));
                    }
                    rows.push_str(" = 1\n");
                    next_row(&mut rows, "link");
                    let mut rhs = 0.0;
                    for j in 0..m {
                        let inx = x >> j & 1 == 1;
                        let free = avail >> j & 1 == 1;
                        if t.kernel.is_rbf() {
                            if inx {
                                rhs -= 1.0;
                                if free {
                                    term(&mut rows, -1.0, &a(i, j));
                                }
                            } else if free {
                                term(&mut rows, 1.0, &a(i, j));
                            }
                        } else if inx && free {
                            term(&mut rows, 1.0, &a(i, j));
                        }
                    }
                    for tau in 1..=t.tau_max(k) {
                        term(&mut rows, -(tau as f64), &z(tau));
                    }
                    let _ = writeln!(rows, " = {rhs}");
                }
            }
            Encoding::Table(_) => {
                return Err(Error::Capability("value tables have no LP encoding".into()));
            }
        }
        for x in p.excluded_masks(i) {
            next_row(&mut rows, "cut");
            let mut rhs = 1.0;
            for j in 0..m {
                let inx = x >> j & 1 == 1;
                let free = avail >> j & 1 == 1;
                if inx {
                    rhs -= 1.0;
                    if free {
                        term(&mut rows, -1.0, &a(i, j));
                    }
                } else if free {
                    term(&mut rows, 1.0, &a(i, j));
                }
            }
            if rows.ends_with(':') {
                rows.push_str(" 0 a_dummy");
            }
            let _ = writeln!(rows, " >= {rhs}");
        }
    }
    for j in bit_iter(avail) {
        next_row(&mut rows, "item");
        for &i in &members {
            term(&mut rows, 1.0, &a(i, j));
        }
        rows.push_str(" <= 1\n");
    }

    let mut out = String::from("\\ winner determination problem\nMaximize\n obj:");
    out.push_str(if obj.is_empty() { " 0 a_dummy" } else { &obj });
    if !quad.is_empty() {
        let _ = write!(out, " + [{quad} ] / 2");
    }
    out.push_str("\nSubject To\n");
    out.push_str(&rows);
    out.push_str("Bounds\n 0 <= a_dummy <= 0\nBinaries\n");
    for b in &binaries {
        let _ = writeln!(out, " {b}");
    }
    out.push_str("End\n");
    Ok(out)
}
