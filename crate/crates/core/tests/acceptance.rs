//! Acceptance run: nine exact checks, one pass/fail line each. Independent
//! oracles (plain recurrence, permanent, matrix mutation) live here rather
//! than in the library.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;

use galerob::galerob::{d, d_popoviciu, gr_numbers, principal_sequence};
use galerob::kuo::{verify_kuo, verify_prop_superpositions};
use galerob::matching::{enumerate_matchings, graph_weight, verify_lattice};
use galerob::pinecone::{
    build_pinecone_aztec, build_pinecone_strips, central_strip_label_counts, is_white, verify_borders, Pinecone,
};
use galerob::quiver::{
    c_vector_closed_form, c_vectors_direct, cluster_variables, e_vector, f_vector, gale_robinson_quiver,
    underline_index,
};
use galerob::GRSpec;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn specs() -> [GRSpec; 3] {
    [GRSpec::new(1, 2, 4).unwrap(), GRSpec::new(1, 2, 5).unwrap(), GRSpec::new(2, 3, 7).unwrap()]
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Plain recurrence from all-ones data, written out directly.
fn plain_oracle(spec: GRSpec, n_max: usize) -> Vec<BigInt> {
    let GRSpec { r, s, n: big } = spec;
    let mut x = vec![BigInt::from(1); big];
    for n in big + 1..=n_max {
        let at = |k: usize| &x[k - 1];
        let num = at(n - r) * at(n - big + r) + at(n - s) * at(n - big + s);
        assert_eq!(&num % at(n - big), BigInt::from(0), "{spec} n={n} not integral");
        x.push(num / at(n - big));
    }
    x
}

/// Permanent of the black-by-white adjacency matrix by expansion along rows.
fn permanent(g: &Pinecone) -> Option<u64> {
    let black: Vec<_> = g.vertices().iter().filter(|v| !is_white(**v)).copied().collect();
    let white: Vec<_> = g.vertices().iter().filter(|v| is_white(**v)).copied().collect();
    if black.len() != white.len() {
        return Some(0);
    }
    if white.len() > 64 {
        return None;
    }
    let adj: Vec<Vec<usize>> = black
        .iter()
        .map(|&b| {
            (0..white.len())
                .filter(|&k| g.edges().iter().any(|e| (e.0 == b && e.1 == white[k]) || (e.1 == b && e.0 == white[k])))
                .collect()
        })
        .collect();
    fn expand(adj: &[Vec<usize>], row: usize, used: u64) -> u64 {
        if row == adj.len() {
            return 1;
        }
        adj[row].iter().filter(|&&c| used & (1 << c) == 0).map(|&c| expand(adj, row + 1, used | (1 << c))).sum()
    }
    Some(expand(&adj, 0, 0))
}

/// Matrix mutation `μ_k` of an exchange matrix, 0-based.
fn mutate_matrix(b: &[Vec<i32>], k: usize) -> Vec<Vec<i32>> {
    let n = b.len();
    let mut out = b.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

fn three_way() -> Check {
    let mut checked = 0;
    for spec in specs() {
        let n_max = spec.n + 9;
        let mutation = cluster_variables(spec, n_max).map_err(|e| e.to_string())?;
        let recurrence = principal_sequence(spec, n_max).map_err(|e| e.to_string())?;
        for n in 1..=n_max {
            let g = build_pinecone_strips(spec, n).map_err(|e| e.to_string())?;
            let weight = graph_weight(&g).map_err(|e| e.to_string())?;
            ensure(mutation[n - 1] == recurrence[n - 1], || format!("{spec} n={n}: mutation vs recurrence"))?;
            ensure(mutation[n - 1] == weight, || format!("{spec} n={n}: mutation vs matchings"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} cluster variables identical three ways"))
}

fn integer_specialization() -> Check {
    let listed: [(GRSpec, &[u64]); 3] = [
        (specs()[0], &[2, 3, 7, 23, 59, 314, 1529]),
        (specs()[1], &[2, 3, 5, 11, 37, 83]),
        (specs()[2], &[2, 2, 3, 4, 7, 14, 26]),
    ];
    for (spec, want) in listed {
        let n_max = spec.n + 9;
        let oracle = plain_oracle(spec, n_max);
        ensure(gr_numbers(spec, n_max) == oracle, || format!("{spec}: library numbers differ from the oracle"))?;
        let ones: Vec<BigInt> =
            principal_sequence(spec, n_max).map_err(|e| e.to_string())?.iter().map(|p| p.at_ones()).collect();
        ensure(ones == oracle, || format!("{spec}: specialization differs from the oracle"))?;
        let head: Vec<BigInt> = want.iter().map(|&v| BigInt::from(v)).collect();
        ensure(oracle[spec.n..spec.n + want.len()] == head[..], || format!("{spec}: listed numbers differ"))?;
    }
    Ok("specializations match the plain recurrence and the listed numbers".into())
}

fn permanents() -> Check {
    let mut graphs = 0;
    for spec in specs() {
        for n in spec.n + 1..=spec.n + 12 {
            let g = build_pinecone_strips(spec, n).map_err(|e| e.to_string())?;
            if g.vertices().len() > 40 {
                continue;
            }
            let perm = permanent(&g).ok_or("too many columns")?;
            let count = enumerate_matchings(&g).len() as u64;
            ensure(perm == count, || format!("{spec} n={n}: permanent {perm}, enumeration {count}"))?;
            graphs += 1;
        }
    }
    ensure(graphs > 0, || "no graph small enough".into())?;
    Ok(format!("{graphs} pinecones with at most 40 vertices"))
}

fn partition_function() -> Check {
    for (a, b) in [(1, 3), (2, 5), (2, 3), (3, 4)] {
        for m in 0..=200 {
            let (x, y) = (d(m, a, b).map_err(|e| e.to_string())?, d_popoviciu(m, a, b).map_err(|e| e.to_string())?);
            ensure(x == y, || format!("d({m},{a},{b}) = {x}, closed form {y}"))?;
            if m >= a {
                let rhs = d(m - a, a, b).unwrap() + u64::from(m % b == 0);
                ensure(x == rhs, || format!("shift identity at d({m},{a},{b})"))?;
            }
        }
    }
    Ok("closed form and shift identity for m <= 200".into())
}

fn c_vectors() -> Check {
    let mut count = 0;
    for spec in specs() {
        let r = spec.r as i64;
        let mut f_indices = BTreeSet::new();
        for l in 0..=3 * spec.n {
            for (i, direct) in c_vectors_direct(spec, l).iter().enumerate() {
                let closed = c_vector_closed_form(spec, i + 1, l);
                ensure(&closed == direct, || format!("{spec} i={} l={l}: {:?} vs {:?}", i + 1, closed.0, direct.0))?;
                ensure(direct.is_sign_coherent(), || format!("{spec} i={} l={l}: not sign-coherent", i + 1))?;
                let u = underline_index(spec, i + 1, l);
                if l >= spec.r && (u < l as i64 + 1 - r || u > l as i64 + r) {
                    f_indices.insert(u);
                }
                count += 1;
            }
        }
        let big = spec.n as i64;
        for m in f_indices {
            let diff: Vec<i32> =
                e_vector(spec, m + big).0.iter().zip(&e_vector(spec, m + big - r).0).map(|(a, b)| a - b).collect();
            ensure(f_vector(spec, m).0 == diff, || format!("{spec}: F identity at {m}"))?;
        }
    }
    Ok(format!("{count} c-vectors"))
}

fn periodicity() -> Check {
    for spec in specs() {
        let q = gale_robinson_quiver(spec);
        ensure(q.is_periodic(1).map_err(|e| e.to_string())?, || format!("{spec}: library says not periodic"))?;
        let b = q.exchange_matrix();
        let mu = mutate_matrix(b, 0);
        let n = spec.n;
        let rho = |i: usize| (i + n - 1) % n;
        for i in 0..n {
            for j in 0..n {
                ensure(mu[i][j] == b[rho(i)][rho(j)], || format!("{spec}: entry ({},{})", i + 1, j + 1))?;
            }
        }
    }
    Ok("one mutation then relabeling restores each quiver".into())
}

fn pinecone_structure() -> Check {
    let mut graphs = 0;
    for spec in specs() {
        let (r, big) = (spec.r as i64, spec.n as i64);
        for n in spec.n + 1..=spec.n + 9 {
            let strips = build_pinecone_strips(spec, n).map_err(|e| e.to_string())?;
            let aztec = build_pinecone_aztec(spec, n).map_err(|e| e.to_string())?;
            ensure(strips.vertices() == aztec.vertices() && strips.edges() == aztec.edges(), || {
                format!("{spec} n={n}: constructions differ")
            })?;
            for (&i, &c) in &central_strip_label_counts(spec, n).map_err(|e| e.to_string())? {
                let want = d(n as i64 - big - i as i64, r, big - r).unwrap();
                ensure(c as u64 == want, || format!("{spec} n={n}: label {i} appears {c} times, want {want}"))?;
            }
            ensure(verify_borders(spec, n).map_err(|e| e.to_string())?, || format!("{spec} n={n}: borders"))?;
            graphs += 1;
        }
    }
    Ok(format!("{graphs} pinecones"))
}

fn kuo() -> Check {
    let mut pairs = 0;
    for (spec, n_max) in [(specs()[0], 9), (specs()[2], 14)] {
        for n in spec.n + 1..=n_max {
            let rep = verify_kuo(spec, n).map_err(|e| format!("{spec} n={n}: {e}"))?;
            ensure(rep.passed(), || format!("{spec} n={n}: {:?}", rep.counterexample))?;
            let weighted = verify_prop_superpositions(spec, n).map_err(|e| e.to_string())?;
            ensure(weighted, || format!("{spec} n={n}: weighted recurrence"))?;
            pairs += rep.pairs;
        }
    }
    Ok(format!("{pairs} (M_A, M_C) pairs under both cycle rules"))
}

fn lattice() -> Check {
    let mut graphs = 0;
    for spec in specs() {
        for n in spec.n + 1..=spec.n + 9 {
            let g = build_pinecone_strips(spec, n).map_err(|e| e.to_string())?;
            let rep = verify_lattice(&g, 3, 100, n as u64).map_err(|e| e.to_string())?;
            ensure(rep.passed() && rep.sampled_twists == 100, || format!("{spec} n={n}: {rep:?}"))?;
            graphs += 1;
        }
    }
    Ok(format!("{graphs} matching lattices"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("three-way exactness", three_way),
        ("integer specialization", integer_specialization),
        ("matching count vs permanent", permanents),
        ("partition function", partition_function),
        ("c-vectors", c_vectors),
        ("periodicity", periodicity),
        ("pinecone structure", pinecone_structure),
        ("condensation suite", kuo),
        ("lattice suite", lattice),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}; {secs:.2}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
