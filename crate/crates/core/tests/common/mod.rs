//! Test-only oracles. Nothing here calls into the crate's simulation path:
//! gates are rebuilt from their textbook 2×2 definitions, embedded with
//! Kronecker products, and applied as dense matrix-vector products.

#![allow(dead_code)]

use num_complex::Complex64 as C;

pub type Dense = Vec<Vec<C>>;

#[derive(Clone, Copy, Debug)]
pub enum G {
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    H(usize),
    X(usize),
    Cnot(usize, usize),
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn local(g: G) -> [[C; 2]; 2] {
    match g {
        G::Rx(_, t) => {
            let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[c(co, 0.0), c(0.0, -si)], [c(0.0, -si), c(co, 0.0)]]
        }
        G::Ry(_, t) => {
            let (co, si) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[c(co, 0.0), c(-si, 0.0)], [c(si, 0.0), c(co, 0.0)]]
        }
        G::Rz(_, t) => [
            [c((t / 2.0).cos(), -(t / 2.0).sin()), c(0.0, 0.0)],
            [c(0.0, 0.0), c((t / 2.0).cos(), (t / 2.0).sin())],
        ],
        G::H(_) => {
            let r = 1.0 / 2f64.sqrt();
            [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
        }
        G::X(_) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        G::Cnot(..) => unreachable!(),
    }
}

fn identity(dim: usize) -> Dense {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Single-qubit operator on `q` of an n-qubit register, qubit 0 leftmost.
fn embed(u: &Dense, q: usize, n: usize) -> Dense {
    let mut m = identity(1);
    for i in 0..n {
        let f = if i == q { u.clone() } else { identity(2) };
        m = kron(&m, &f);
    }
    m
}

/// CNOT = |0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ X_t.
fn cnot(control: usize, target: usize, n: usize) -> Dense {
    let p0 = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]];
    let p1 = vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
    let x = vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
    let mut a = identity(1);
    let mut b = identity(1);
    for i in 0..n {
        let (fa, fb) = if i == control {
            (p0.clone(), p1.clone())
        } else if i == target {
            (identity(2), x.clone())
        } else {
            (identity(2), identity(2))
        };
        a = kron(&a, &fa);
        b = kron(&b, &fb);
    }
    a.iter()
        .zip(&b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn dense(g: G, n: usize) -> Dense {
    match g {
        G::Cnot(ctl, tgt) => cnot(ctl, tgt, n),
        G::Rx(q, _) | G::Ry(q, _) | G::Rz(q, _) | G::H(q) | G::X(q) => {
            let u = local(g);
            embed(&u.iter().map(|r| r.to_vec()).collect(), q, n)
        }
    }
}

pub fn circuit_unitary(gates: &[G], n: usize) -> Dense {
    gates.iter().fold(identity(1 << n), |acc, &g| matmul(&dense(g, n), &acc))
}

pub fn matvec(m: &Dense, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn run(gates: &[G], n: usize) -> Vec<C> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    for &g in gates {
        v = matvec(&dense(g, n), &v);
    }
    v
}

/// ⟨Z_q⟩ with qubit 0 as the most significant bit.
pub fn z_expect(v: &[C], q: usize, n: usize) -> f64 {
    v.iter()
        .enumerate()
        .map(|(i, a)| if (i >> (n - 1 - q)) & 1 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

pub fn to_crate(g: G) -> qml_roughness::statevector::Gate {
    use qml_roughness::statevector::Gate;
    match g {
        G::Rx(target, theta) => Gate::Rx { target, theta },
        G::Ry(target, theta) => Gate::Ry { target, theta },
        G::Rz(target, theta) => Gate::Rz { target, theta },
        G::H(target) => Gate::H { target },
        G::X(target) => Gate::X { target },
        G::Cnot(control, target) => Gate::Cnot { control, target },
    }
}

/// Oracle QNN circuit (embedding, then layers of RX·RZ + CNOT chain).
pub fn qnn_gates(theta: &[f64], x: &[f64], layers: usize) -> Vec<G> {
    let n = x.len();
    let mut g = Vec::new();
    for (j, &xj) in x.iter().enumerate() {
        g.push(G::Rx(j, xj));
        g.push(G::Rz(j, xj));
    }
    for l in 0..layers {
        for j in 0..n {
            g.push(G::Rx(j, theta[(l * n + j) * 2]));
            g.push(G::Rz(j, theta[(l * n + j) * 2 + 1]));
        }
        for j in 1..n {
            g.push(G::Cnot(j - 1, j));
        }
    }
    g
}

/// Oracle VQC circuit (H, RZ(x), chain; then layers of RY·RZ + chain).
pub fn vqc_gates(theta: &[f64], x: &[f64], layers: usize) -> Vec<G> {
    let n = x.len();
    let mut g: Vec<G> = (0..n).map(G::H).collect();
    g.extend(x.iter().enumerate().map(|(j, &xj)| G::Rz(j, xj)));
    g.extend((1..n).map(|j| G::Cnot(j - 1, j)));
    for l in 0..layers {
        for j in 0..n {
            g.push(G::Ry(j, theta[(l * n + j) * 2]));
            g.push(G::Rz(j, theta[(l * n + j) * 2 + 1]));
        }
        g.extend((1..n).map(|j| G::Cnot(j - 1, j)));
    }
    g
}

/// Independent brute-force split search over every (feature, midpoint) pair,
/// using two-pass variances on explicitly partitioned target lists.
pub fn brute_force_split(
    features: &[Vec<f64>],
    targets: &[f64],
    min_leaf: usize,
    tol_rel: f64,
) -> Option<(usize, f64, f64)> {
    fn var(v: &[f64]) -> f64 {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
    }
    let n = targets.len();
    if n < 2 * min_leaf {
        return None;
    }
    let parent = var(targets);
    let tol = tol_rel * parent.max(1.0);
    if parent <= tol {
        return None;
    }
    let mut candidates = Vec::new();
    for f in 0..features[0].len() {
        let mut vals: Vec<f64> = features.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let thr = (w[0] + w[1]) / 2.0;
            let left: Vec<f64> = (0..n).filter(|&i| features[i][f] <= thr).map(|i| targets[i]).collect();
            let right: Vec<f64> = (0..n).filter(|&i| features[i][f] > thr).map(|i| targets[i]).collect();
            if left.len() < min_leaf || right.len() < min_leaf {
                continue;
            }
            let child = (left.len() as f64 * var(&left) + right.len() as f64 * var(&right)) / n as f64;
            candidates.push((f, thr, parent - child));
        }
    }
    let max = candidates.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
    if !(max > tol) {
        return None;
    }
    // first candidate in (feature, threshold) order whose decrease ties the max
    candidates.into_iter().find(|c| c.2 >= max - tol)
}
