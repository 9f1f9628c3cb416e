//! The subcommands.

use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use superlin::cartan_poincare::{self, Assembly};
use superlin::derivations::{self, GenImageMap, Grading};
use superlin::exterior::ExtTerm;
use superlin::lie_super::{self, LieJson, LieSuperData, RepAndForm};
use superlin::linalg;
use superlin::poly::Poly;
use superlin::polydiff_jets::{self, OpTermJson, PolyDiffOp};
use superlin::scalar::{self, int};
use superlin::straightening::{self, FamilyJson, OddFamily, SolveMode};
use superlin::super_derham::{self, ConnectionJson, FormTerm, SuperForm};
use superlin::super_tensor::{self, Gen, SuperSpace, TensorWord};
use superlin::supermaps::{self, PolySuperFunc, SuperMapData, SuperMapJson};
use superlin::{ExtElem, IndexSet, MultiDegree, Parity, Permutation, Scalar};
use superlin_verify::criteria::{self, Budget};
use superlin_verify::oracle::{self, LeibnizMode};

use crate::input::{cube, read_json, CliError};
use crate::output::Outcome;

type CmdResult = Result<Outcome, CliError>;

fn fmt(x: &Scalar) -> String {
    scalar::format(x)
}

fn matrix_json(m: &[Vec<Scalar>]) -> Value {
    json!(m.iter().map(|r| r.iter().map(fmt).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// `{"dim_v": n, "dim_w": m, "f": [[…]]}`; `F` is `dim_w × dim_v`.
#[derive(Deserialize)]
struct MatrixInput {
    #[serde(default)]
    dim_v: Option<usize>,
    #[serde(default)]
    dim_w: Option<usize>,
    #[serde(with = "scalar::serde_mat")]
    f: Vec<Vec<Scalar>>,
}

pub fn cp_homology(path: &Path, kmax: u32, lmax: usize, how: Assembly) -> CmdResult {
    let inp: MatrixInput = read_json(path)?;
    let m = inp.dim_w.unwrap_or(inp.f.len());
    let n = inp.dim_v.or_else(|| inp.f.first().map(Vec::len)).unwrap_or(0);
    let tab = cartan_poincare::homology_dims(&inp.f, n, m, kmax, lmax, how)?;
    let mut o = Outcome::new("cp-homology");
    o.check("matches_sym_ker_tensor_ext_coker", tab.matches(), format!("rank F = {}, dim V = {n}, dim W = {m}", linalg::rank(&inp.f)));
    o.data = json!({"computed": tab.computed, "predicted": tab.predicted, "match": tab.matches()});
    let mut header = vec!["k\\l".to_string()];
    header.extend((0..=lmax).map(|l| l.to_string()));
    o.table.push(header);
    for (k, (c, p)) in tab.computed.iter().zip(&tab.predicted).enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(c.iter().zip(p).map(|(a, b)| if a == b { a.to_string() } else { format!("{a}≠{b}") }));
        o.table.push(row);
    }
    Ok(o)
}

#[derive(Deserialize)]
struct ImagesInput {
    images: Vec<Vec<ExtTerm>>,
}

fn ext_json(e: &ExtElem) -> Value {
    serde_json::to_value(e.to_json()).expect("terms serialize")
}

pub fn derivation_classify(path: &Path) -> CmdResult {
    let inp: ImagesInput = read_json(path)?;
    let n = inp.images.len();
    let images = inp.images.iter().map(|t| ExtElem::from_json(n, t)).collect::<superlin::Result<Vec<_>>>()?;
    let map = GenImageMap::new(images)?;
    let c = derivations::classify(&map);
    let back = derivations::reconstruct(&c);
    let mut o = Outcome::new("derivation-classify");
    o.check("reconstruct_classify_roundtrip", back == map, if back == map { "images recovered exactly".to_string() } else { "the images do not define a derivation".to_string() });
    o.data = json!({
        "f_minus": c.f_minus.images().iter().map(ext_json).collect::<Vec<_>>(),
        "eta": ext_json(&c.eta),
        "reconstructed": back.images().iter().map(ext_json).collect::<Vec<_>>(),
    });
    o.table.push(vec!["part".into(), "value".into()]);
    for (mu, im) in c.f_minus.images().iter().enumerate() {
        o.table.push(vec![format!("F-(dv{})", mu + 1), format!("{im:?}")]);
    }
    o.table.push(vec!["eta".into(), format!("{:?}", c.eta)]);
    Ok(o)
}

pub fn sder_dims(nmax: usize) -> CmdResult {
    let mut o = Outcome::new("sder-dims");
    o.table.push(["n", "der", "der_z2", "der_z", "sder", "brute_force"].iter().map(|s| s.to_string()).collect());
    let mut rows = Vec::new();
    for n in 1..=nmax {
        let all = derivations::dimension_of_derivation_space(n, Grading::All)?;
        let z2 = derivations::dimension_of_derivation_space(n, Grading::Z2)?;
        let z = derivations::dimension_of_derivation_space(n, Grading::Z)?;
        let sder = derivations::superderivation_space_dimension(n);
        let brute = if n <= 4 {
            let b = oracle::derivation_space(n, LeibnizMode::Ungraded).dim() as u64;
            let s = (oracle::derivation_space(n, LeibnizMode::SuperEven).dim() + oracle::derivation_space(n, LeibnizMode::SuperOdd).dim()) as u64;
            let zz = oracle::derivation_space(n, LeibnizMode::ZGraded).dim() as u64;
            o.check(format!("n{n}_brute_force"), b == all && s == sder && zz == z, format!("der {b}, sder {s}, degree-preserving {zz}"));
            b.to_string()
        } else {
            "-".to_string()
        };
        rows.push(json!({"n": n, "der": all, "der_z2": z2, "der_z": z, "sder": sder}));
        o.table.push(vec![n.to_string(), all.to_string(), z2.to_string(), z.to_string(), sder.to_string(), brute]);
    }
    o.data = json!(rows);
    Ok(o)
}

/// `(𝔤, ρ, B)` with `g[i][j][k]`, `rho[i][a][c]` and `b[a][c][k]`.
#[derive(Deserialize)]
struct RepInput {
    #[serde(with = "cube")]
    g: Vec<Vec<Vec<Scalar>>>,
    #[serde(with = "cube")]
    rho: Vec<Vec<Vec<Scalar>>>,
    #[serde(with = "cube")]
    b: Vec<Vec<Vec<Scalar>>>,
    s_dim: usize,
}

pub fn lie_check(path: &Path, rep: bool) -> CmdResult {
    let mut o = Outcome::new("lie-check");
    if rep {
        let inp: RepInput = read_json(path)?;
        let data = RepAndForm { g: inp.g, rho: inp.rho, b: inp.b, s_dim: inp.s_dim };
        let cond = lie_super::check_structure_conditions(&data)?;
        let cond_ok = cond.passed();
        o.report("conditions", cond);
        let built = lie_super::build_from_rho_b(&data)?;
        let lie = lie_super::check_lie_superalgebra(&built)?;
        let lie_ok = lie.passed();
        o.report("superalgebra", lie);
        o.check("conditions_iff_superalgebra", cond_ok == lie_ok, format!("conditions {cond_ok}, super-Jacobi {lie_ok}"));
        o.data = serde_json::to_value(built.to_json()).expect("serializes");
    } else {
        let inp: LieJson = read_json(path)?;
        let l = LieSuperData::from_json(&inp)?;
        o.report("", lie_super::check_lie_superalgebra(&l)?);
        o.data = json!({"even_dim": inp.even_dim, "odd_dim": inp.odd_dim});
    }
    Ok(o)
}

/// `{"even_dim": p, "odd_dim": q, "factors": [{"parity", "index"}], "coeff"}`.
#[derive(Deserialize)]
struct WordInput {
    even_dim: usize,
    odd_dim: usize,
    factors: Vec<FactorInput>,
    #[serde(default = "one", with = "scalar::serde_str")]
    coeff: Scalar,
}

#[derive(Deserialize)]
struct FactorInput {
    parity: Parity,
    index: usize,
}

fn one() -> Scalar {
    int(1)
}

pub fn tensor_normalize(path: &Path) -> CmdResult {
    let inp: WordInput = read_json(path)?;
    let space = SuperSpace::new(inp.even_dim, inp.odd_dim);
    let factors: Vec<Gen> = inp.factors.iter().map(|f| if f.parity == Parity::Even { Gen::even(f.index) } else { Gen::odd(f.index) }).collect();
    let word = TensorWord::new(space, factors, inp.coeff)?;
    let sym = super_tensor::normalize_supersym(&word);
    let ext = super_tensor::normalize_superext(&word);
    let mut o = Outcome::new("tensor-normalize");
    let k = word.rank();
    if k <= 6 {
        let perms = Permutation::all(k);
        let mut sym_bad = 0;
        let mut ext_bad = 0;
        for s in &perms {
            if super_tensor::normalize_supersym(&super_tensor::act_sym(s, &word)?) != sym {
                sym_bad += 1;
            }
            if super_tensor::normalize_superext(&super_tensor::act_alt(s, &word)?) != ext {
                ext_bad += 1;
            }
        }
        o.check("symmetric_action_descends", sym_bad == 0, format!("{sym_bad} of {} permutations change the normal form", perms.len()));
        o.check("alternating_action_descends", ext_bad == 0, format!("{ext_bad} of {} permutations change the normal form", perms.len()));
    } else {
        o.notes.push(format!("rank {k} > 6: permutation invariance not checked"));
    }
    o.data = json!({"supersym": sym.to_json(), "superext": ext.to_json()});
    o.table.push(vec!["quotient".into(), "normal_form".into()]);
    o.table.push(vec!["Sym V0 ⊗ Λ V1".into(), serde_json::to_string(&sym.to_json()).expect("serializes")]);
    o.table.push(vec!["Λ V0 ⊗ Sym V1".into(), serde_json::to_string(&ext.to_json()).expect("serializes")]);
    Ok(o)
}

pub fn straighten(path: &Path, mode: SolveMode) -> CmdResult {
    let inp: FamilyJson = read_json(path)?;
    let fam = OddFamily::from_json(&inp)?;
    let g = straightening::straighten_with(&fam, &mode)?;
    let mut o = Outcome::new("straighten");
    o.report("", straightening::verify_straightening(&fam, &g)?);
    o.data = json!({"generator_images": g.to_json()});
    o.table.push(vec!["generator".into(), "image".into()]);
    for (i, im) in g.images().iter().enumerate() {
        o.table.push(vec![format!("s{}", i + 1), format!("{im:?}")]);
    }
    Ok(o)
}

/// `{"op": [OpTerm], "point": ["p/q", …], "k": K}`.
#[derive(Deserialize)]
struct JetInput {
    op: Vec<OpTermJson>,
    #[serde(with = "scalar::serde_vec")]
    point: Vec<Scalar>,
    #[serde(default)]
    k: Option<u32>,
}

pub fn jet_factor(path: &Path, k_flag: Option<u32>) -> CmdResult {
    let inp: JetInput = read_json(path)?;
    let d = PolyDiffOp::from_json(&inp.op)?;
    let k = k_flag.or(inp.k).unwrap_or_else(|| d.order().unwrap_or(0));
    let p = inp.point;
    let mat = polydiff_jets::factor_through_jet(&d, k, &p)?;
    let mut o = Outcome::new("jet-factor");
    let mut bad = Vec::new();
    let mut count = 0;
    for beta in MultiDegree::up_to_degree(d.m, k + 1) {
        for j in 0..d.r_in {
            let s: Vec<Poly> = (0..d.r_in).map(|i| if i == j { Poly::monomial(beta.clone(), int(1)) } else { Poly::zero(d.m) }).collect();
            let direct: Vec<Scalar> = d.apply(&s)?.iter().map(|x| x.eval(&p)).collect();
            let via = linalg::mat_vec(&mat, &polydiff_jets::jet(&s, k, &p).coefficient_vector());
            count += 1;
            if direct != via {
                bad.push(format!("x^{:?} e{}", beta.0, j + 1));
            }
        }
    }
    o.check("factors_through_jet", bad.is_empty(), if bad.is_empty() { format!("{count} test sections") } else { format!("differs on {}", bad.join(", ")) });
    let coords: Vec<Poly> = (1..=d.m).map(|i| Poly::var(d.m, i)).collect();
    let order = d.order().unwrap_or(0);
    let mut formula_bad = 0;
    let mut annihilated = true;
    for depth in 1..=(order as usize + 1) {
        for i in 0..coords.len().pow(depth as u32) {
            let fs: Vec<Poly> = (0..depth).map(|t| coords[(i / coords.len().pow(t as u32)) % coords.len()].clone()).collect();
            let it = polydiff_jets::iterated_commutator(&d, &fs);
            if it != polydiff_jets::nested_commutator(&d, &fs) {
                formula_bad += 1;
            }
            if depth == order as usize + 1 && !it.is_zero() {
                annihilated = false;
            }
        }
    }
    o.check("commutator_formula", formula_bad == 0, format!("{formula_bad} mismatches with coordinate probes"));
    o.check("order_annihilation", annihilated, format!("{}-fold commutators with coordinates vanish", order + 1));
    o.data = json!({"k": k, "order": order, "point": p.iter().map(fmt).collect::<Vec<_>>(), "matrix": matrix_json(&mat)});
    o.table = mat.iter().map(|r| r.iter().map(fmt).collect()).collect();
    o.table.insert(0, (0..mat.first().map_or(0, Vec::len)).map(|c| format!("c{c}")).collect());
    Ok(o)
}

pub fn supermap_check(path: &Path) -> CmdResult {
    let inp: SuperMapJson = read_json(path)?;
    let phi = SuperMapData::from_json(&inp)?;
    let (n, q) = phi.target_dims();
    let mut o = Outcome::new("supermap-check");
    o.report("order_bound", supermaps::order_bound_check(&phi)?);
    o.report("", supermaps::filtration_check(&phi)?);
    let mut aug_bad = 0;
    for beta in MultiDegree::up_to_degree(n, 2) {
        for set in IndexSet::all_subsets(q) {
            let f = PolySuperFunc::monomial(q, beta.clone(), set, int(1));
            if supermaps::apply(&phi, &f)?.augmentation() != phi.pullback(&f.augmentation())? {
                aug_bad += 1;
            }
        }
    }
    o.check("augmentation_commutes", aug_bad == 0, format!("{aug_bad} probe monomials violate ε∘Φ = φ*∘ε"));
    let oz = supermaps::order_zero_criterion(&phi);
    let ml = supermaps::is_module_linear(&phi)?;
    o.check("order_zero_iff_module_linear", oz == ml, format!("order zero {oz}, module-linear {ml}"));
    o.data = json!({"order_bound": supermaps::order_bound(&phi), "order_zero": oz, "module_linear": ml, "target_dims": [n, q]});
    Ok(o)
}

/// Which operator `sderham` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SderhamOp {
    D,
    Delta,
    Cohomology,
}

pub fn sderham(conn_path: &Path, op: SderhamOp, k: usize, cutoff: usize, form: Option<&Path>) -> CmdResult {
    let cj: ConnectionJson = read_json(conn_path)?;
    let conn = super_derham::connection_from_json(&cj)?;
    let (m, n) = (conn.m, conn.r);
    let w = match form {
        Some(p) => {
            let terms: Vec<FormTerm> = read_json(p)?;
            Some(SuperForm::from_json(m, n, &terms)?)
        }
        None => None,
    };
    let mut o = Outcome::new("sderham");
    match (op, w) {
        (SderhamOp::D, Some(w)) => {
            let dw = super_derham::super_d(&conn, &w)?;
            let ddw = super_derham::super_d(&conn, &dw)?;
            o.check("d_squared_zero", ddw.is_zero(), "d(dω) = 0");
            o.data = json!({"d": dw.to_json()});
            o.table.push(vec!["dω".into(), format!("{dw:?}")]);
        }
        (SderhamOp::D, None) => {
            let basis = super_derham::basis(m, n, k, cutoff);
            let mut bad = 0;
            for key in &basis {
                let e = SuperForm::monomial(m, n, key.clone(), int(1));
                if !super_derham::super_d(&conn, &super_derham::super_d(&conn, &e)?)?.is_zero() {
                    bad += 1;
                }
            }
            o.check("d_squared_zero", bad == 0, format!("{bad} of {} basis {k}-forms of weight ≤ {cutoff} fail", basis.len()));
            o.data = json!({"k": k, "cutoff": cutoff, "basis_size": basis.len()});
        }
        (SderhamOp::Delta, Some(w)) => {
            let dw = super_derham::delta_operator(&conn, &w)?;
            let mut bad = 0;
            for (key, c) in &w.terms {
                let weight = -2 * (key.b.total() as i64 + key.c.len() as i64);
                let expected = (weight != 0).then(|| c * &int(weight));
                if dw.terms.get(key) != expected.as_ref() {
                    bad += 1;
                }
            }
            let extra = dw.terms.keys().filter(|k| !w.terms.contains_key(k)).count();
            o.check("delta_scales_by_weight", bad + extra == 0, format!("{} terms differ from −2(|ds| + |θ|)·ω", bad + extra));
            o.data = json!({"delta": dw.to_json()});
            o.table.push(vec!["Δω".into(), format!("{dw:?}")]);
        }
        (SderhamOp::Delta, None) => {
            o.report("", super_derham::delta_kernel_check(&conn, cutoff)?);
            o.data = json!({"cutoff": cutoff});
        }
        (SderhamOp::Cohomology, _) => {
            let dims = (0..=k).map(|j| super_derham::cohomology_dims(&conn, j, cutoff)).collect::<superlin::Result<Vec<_>>>()?;
            let want: Vec<usize> = (0..=k).map(|j| usize::from(j == 0)).collect();
            o.check("matches_de_rham", dims == want, format!("dims {dims:?} at weight cutoff {cutoff}"));
            o.data = json!({"dims": dims, "cutoff": cutoff});
            o.table.push(vec!["k".into(), "dim H^k".into()]);
            for (j, d) in dims.iter().enumerate() {
                o.table.push(vec![j.to_string(), d.to_string()]);
            }
        }
    }
    Ok(o)
}

pub fn fuzz_all(seed: u64, budget: Budget) -> CmdResult {
    let mut o = Outcome::new("fuzz-all");
    let results = criteria::run_all(seed, budget);
    o.notes.push("timings:".into());
    for r in &results {
        let name = format!("c{:02}_{}", r.id, r.name);
        o.check(name.clone(), r.passed, r.detail.clone());
        let flag = if r.within_limit() { "" } else { "  OVER LIMIT" };
        o.notes.push(format!("  {name}: {:.2} s / {} s{flag}", r.elapsed.as_secs_f64(), r.limit.as_secs()));
    }
    o.data = json!({"seed": seed, "budget": format!("{budget:?}").to_lowercase()});
    Ok(o)
}
