use num_traits::{One, Zero};
use pellrank::f2linalg::{self, Rational};
use pellrank::{arith, model, quadform, redei};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, f: impl FnOnce() -> Result<String, String>) -> Check {
    match f() {
        Ok(detail) => Check { name: name.into(), pass: true, detail },
        Err(detail) => Check { name: name.into(), pass: false, detail },
    }
}

fn markov() -> Result<String, String> {
    for n in 0..=12 {
        let (lhs, rhs) = f2linalg::markov_identity_check(n);
        if lhs != rhs {
            return Err(format!("n = {n}: {lhs} != {rhs}"));
        }
    }
    Ok("n <= 12 exact".into())
}

fn kernel_rank_sums() -> Result<String, String> {
    for m in 0..=16 {
        for n in 0..=16 {
            let s: Rational = (0..=n).map(|j| f2linalg::prob_kernel_rank(m, n, j)).sum();
            if !s.is_one() {
                return Err(format!("sum over j of P({m}, {n}, j) = {s}"));
            }
        }
    }
    Ok("m, n <= 16 exact".into())
}

fn enumeration(max: usize) -> Result<String, String> {
    for m in 0..=max {
        for n in 0..=max {
            let st = f2linalg::enumerate_matrix_stats(m, n).map_err(|e| e.to_string())?;
            for j in 0..=n {
                let seen = st.kernel_rank.get(&j).cloned().unwrap_or_else(Rational::zero);
                let p = f2linalg::prob_kernel_rank(m, n, j);
                if seen != p {
                    return Err(format!("P({m}, {n}, {j}) = {p} but enumeration gives {seen}"));
                }
            }
            if m == n {
                for (&k, freq) in &st.trivial_intersection {
                    let g = f2linalg::g_exact(n, k);
                    if *freq != g {
                        return Err(format!("g({n}, {k}) = {g} but enumeration gives {freq}"));
                    }
                }
            }
        }
    }
    Ok(format!("m, n <= {max} exhaustive"))
}

fn reciprocity(count: usize, seed: u64) -> Result<String, String> {
    let rep = redei::reciprocity_suite(count, 2000, seed);
    if rep.tested < count || rep.failures > 0 {
        return Err(format!(
            "{} tested, {} failures, first {:?}",
            rep.tested,
            rep.failures,
            rep.failed.first()
        ));
    }
    Ok(format!("{} triples", rep.tested))
}

fn rank_oracle(bound: u64, with_rk8: bool) -> Result<String, String> {
    let mut tested = 0;
    for d in arith::squarefree_sieve(bound) {
        let e = |x: pellrank::Error| format!("d = {d}: {x}");
        let p = redei::redei_matrix(d).map_err(e)?;
        let delta = quadform::principal_form(d).map_err(e)?.disc() as i64;
        let cg = quadform::narrow_class_group(delta).map_err(e)?;
        if p.rk4 as u32 != cg.rk4plus {
            return Err(format!("d = {d}: rk4 {} (Rédei) vs {} (forms)", p.rk4, cg.rk4plus));
        }
        if with_rk8 && p.rk4 >= 1 {
            let r8 = redei::artin2_pairing_of(&p, None).map_err(e)?.rk8 as u32;
            if r8 != cg.rk8plus {
                return Err(format!("d = {d}: rk8 {r8} (symbols) vs {} (forms)", cg.rk8plus));
            }
        }
        tested += 1;
    }
    Ok(format!("{tested} fields with d <= {bound}"))
}

fn constants() -> Result<String, String> {
    let a = model::alpha();
    let pb = model::pell_bounds(40).map_err(|e| e.to_string())?;
    let ok = (a - 0.4194).abs() < 5e-5
        && (pb.lower.value - 0.54302).abs() < 5e-6
        && (pb.upper.value - 0.59944).abs() < 5e-6;
    let detail = format!(
        "alpha {a:.10}, bounds ({:.7}, {:.7})",
        pb.lower.value, pb.upper.value
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

pub fn run(full: bool, seed: u64) -> Vec<Check> {
    let (enum_max, triples, bound) = if full { (4, 500, 20_000) } else { (3, 100, 2_000) };
    vec![
        check("markov_identity", markov),
        check("kernel_rank_sums", kernel_rank_sums),
        check("enumeration", || enumeration(enum_max)),
        check("reciprocity", || reciprocity(triples, seed)),
        check("rank_oracle", || rank_oracle(bound, full)),
        check("constants", constants),
    ]
}
