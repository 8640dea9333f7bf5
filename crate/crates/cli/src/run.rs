//! Executes a validated program against the core library.

use densig_core::{
    analyze, bell_channel, channel_comparison, classical_corr_channel, density_from_pure, mixture,
    product_state, product_test, reduce_tripartite, teleport, tripartite_pure,
    BipartiteDensityMatrix, ChannelComparison, Complex64, ComplexMatrix, DensityMatrix, Dims,
    InputStateC, PairSelector, PureState, TeleportOutcome, DEFAULT_PRODUCT_TOL, DEFAULT_RANK_TOL,
};
use thiserror::Error;

use crate::dsl::{
    Env, KetTerm, RhoExpr, Shape, Span, StateProgram, Statement, StatementKind, DEFAULT_DIMS,
};

/// Core error tagged with the statement that raised it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{span}: {source}")]
pub struct RunError {
    pub span: Span,
    pub source: densig_core::Error,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub rank_tol: f64,
    pub product_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            rank_tol: DEFAULT_RANK_TOL,
            product_tol: DEFAULT_PRODUCT_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationSummary {
    pub statements: usize,
    pub dims: Vec<(usize, usize)>,
    pub kets: Vec<String>,
    pub rhos: Vec<String>,
    pub actions: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisSection {
    pub target: String,
    pub line: usize,
    pub n: usize,
    pub m: usize,
    pub basis_label: String,
    /// Row-major `ρ_{ii'}`.
    pub blocks: Vec<ComplexMatrix>,
    pub x: ComplexMatrix,
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub rank_tol: f64,
    pub is_product: bool,
    pub purity: f64,
    pub product_test: bool,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TeleportSection {
    pub target: String,
    pub line: usize,
    pub c1: Complex64,
    pub c2: Complex64,
    pub outcomes: Vec<TeleportOutcome>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonSection {
    pub line: usize,
    pub comparison: ChannelComparison,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Section {
    Analysis(AnalysisSection),
    Teleport(TeleportSection),
    Comparison(ComparisonSection),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub validation: ValidationSummary,
    pub sections: Vec<Section>,
}

fn summarize(program: &StateProgram) -> ValidationSummary {
    let mut summary = ValidationSummary {
        statements: program.statements.len(),
        dims: Vec::new(),
        kets: Vec::new(),
        rhos: Vec::new(),
        actions: 0,
    };
    for stmt in &program.statements {
        match &stmt.kind {
            StatementKind::Dims { n, m } => summary.dims.push((*n, *m)),
            StatementKind::Ket { name, .. } => summary.kets.push(name.ident.clone()),
            StatementKind::Rho { name, .. } => summary.rhos.push(name.ident.clone()),
            _ => summary.actions += 1,
        }
    }
    summary
}

fn materialize_ket(terms: &[KetTerm], shape: Shape) -> densig_core::Result<PureState> {
    let (dims, bounds) = match shape {
        Shape::Bipartite(n, m) => (Dims::bipartite(n, m)?, vec![n, m]),
        Shape::Single(d) => (Dims::single(d)?, vec![d]),
    };
    let mut amps = vec![Complex64::new(0.0, 0.0); dims.total()];
    for t in terms {
        let flat = match t.digits.as_slice() {
            [a, b] if bounds.len() == 2 => dims.flat_index(&[*a, *b])?,
            [i] if *i < dims.total() => *i,
            _ => {
                return Err(densig_core::Error::Dims(format!(
                    "basis label {:?} does not fit a {shape} state",
                    t.digits
                )))
            }
        };
        amps[flat] += t.coeff;
    }
    PureState::normalized(dims, amps)
}

fn eval(expr: &RhoExpr, shape: Shape, env: &Env<'_>) -> densig_core::Result<DensityMatrix> {
    match expr {
        RhoExpr::Ref(name) => eval(
            env.rho(&name.ident).expect("validated reference"),
            shape,
            env,
        ),
        RhoExpr::Proj(name) => {
            let psi = materialize_ket(env.ket(&name.ident).expect("validated reference"), shape)?;
            density_from_pure(&psi)
        }
        RhoExpr::Kron(a, b) => {
            let Shape::Bipartite(n, m) = shape else {
                return Err(densig_core::Error::Dims(
                    "kron in a single-system slot".into(),
                ));
            };
            let ra = eval(a, Shape::Single(n), env)?;
            let rb = eval(b, Shape::Single(m), env)?;
            Ok(product_state(&ra, &rb)?.as_density().clone())
        }
        RhoExpr::Mix(terms) => {
            let weights: Vec<f64> = terms.iter().map(|(w, _)| *w).collect();
            let states = terms
                .iter()
                .map(|(_, e)| eval(e, shape, env))
                .collect::<densig_core::Result<Vec<_>>>()?;
            mixture(&weights, &states)
        }
        RhoExpr::Matrix { rows, .. } => {
            let dims = match shape {
                Shape::Bipartite(n, m) => Dims::bipartite(n, m)?,
                Shape::Single(d) => Dims::single(d)?,
            };
            DensityMatrix::new(dims, ComplexMatrix::from_rows(rows)?)
        }
        RhoExpr::ClassicalCorr(_) => Ok(classical_corr_channel().as_density().clone()),
        RhoExpr::Bell(_) => density_from_pure(&bell_channel()),
        RhoExpr::Tripartite { weights, pair, .. } => {
            let Shape::Bipartite(n, m) = shape else {
                return Err(densig_core::Error::Dims(
                    "tripartite reduction in a single-system slot".into(),
                ));
            };
            let r = weights.len();
            let dims = match pair {
                PairSelector::AB => vec![n, m, r],
                PairSelector::AC => vec![n, r, m],
                PairSelector::BC => vec![r, n, m],
            };
            let psi = tripartite_pure(weights, &Dims::new(dims)?)?;
            Ok(reduce_tripartite(&psi, *pair)?.as_density().clone())
        }
    }
}

fn eval_bipartite(
    expr: &RhoExpr,
    n: usize,
    m: usize,
    env: &Env<'_>,
) -> densig_core::Result<BipartiteDensityMatrix> {
    BipartiteDensityMatrix::from_density(eval(expr, Shape::Bipartite(n, m), env)?)
}

fn run_statement<'p>(
    stmt: &'p Statement,
    dims: (usize, usize),
    env: &Env<'p>,
    opts: &RunOptions,
) -> densig_core::Result<Option<Section>> {
    let line = stmt.span.line;
    match &stmt.kind {
        StatementKind::Analyze { target } => {
            let (n, m) = dims;
            let rho = eval_bipartite(&RhoExpr::Ref(target.clone()), n, m, env)?;
            let a = analyze(&rho, None, opts.rank_tol)?;
            let pt = product_test(&rho, opts.product_tol)?;
            Ok(Some(Section::Analysis(AnalysisSection {
                target: target.ident.clone(),
                line,
                n,
                m,
                basis_label: a.signature.basis_label.clone(),
                blocks: a.blocks.blocks().to_vec(),
                x: a.x.matrix().clone(),
                eigenvalues: a.signature.eigenvalues,
                rank: a.signature.rank,
                rank_tol: a.signature.rel_tol,
                is_product: a.signature.is_product,
                purity: a.signature.purity,
                product_test: pt.is_product,
                deviation: pt.deviation,
            })))
        }
        StatementKind::Teleport { target, c1, c2 } => {
            let channel = eval_bipartite(&RhoExpr::Ref(target.clone()), 2, 2, env)?;
            let input = InputStateC::new(*c1, *c2)?;
            Ok(Some(Section::Teleport(TeleportSection {
                target: target.ident.clone(),
                line,
                c1: *c1,
                c2: *c2,
                outcomes: teleport(&channel, &input)?,
            })))
        }
        StatementKind::Compare { c1, c2 } => {
            let input = InputStateC::new(*c1, *c2)?;
            Ok(Some(Section::Comparison(ComparisonSection {
                line,
                comparison: channel_comparison(&input)?,
            })))
        }
        _ => Ok(None),
    }
}

/// Executes every statement in order.
pub fn run(program: &StateProgram, opts: &RunOptions) -> Result<Report, RunError> {
    let mut env = Env::default();
    let mut dims = DEFAULT_DIMS;
    let mut sections = Vec::new();
    for stmt in &program.statements {
        match &stmt.kind {
            StatementKind::Dims { n, m } => dims = (*n, *m),
            StatementKind::Ket { .. } | StatementKind::Rho { .. } => env.define(stmt),
            _ => {
                let section = run_statement(stmt, dims, &env, opts).map_err(|source| RunError {
                    span: stmt.span,
                    source,
                })?;
                sections.extend(section);
            }
        }
    }
    Ok(Report {
        validation: summarize(program),
        sections,
    })
}

/// Evaluates a named rho as it would be seen by an `analyze` at the end of
/// the program.
pub fn evaluate_named(program: &StateProgram, name: &str) -> densig_core::Result<DensityMatrix> {
    let mut env = Env::default();
    let mut dims = DEFAULT_DIMS;
    for stmt in &program.statements {
        match &stmt.kind {
            StatementKind::Dims { n, m } => dims = (*n, *m),
            StatementKind::Ket { .. } | StatementKind::Rho { .. } => env.define(stmt),
            _ => {}
        }
    }
    let expr = env
        .rho(name)
        .ok_or_else(|| densig_core::Error::State(format!("no rho named '{name}'")))?;
    eval(expr, Shape::Bipartite(dims.0, dims.1), &env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_state_spec;

    fn run_src(src: &str) -> Result<Report, RunError> {
        run(&parse_state_spec(src).unwrap(), &RunOptions::default())
    }

    #[test]
    fn analyze_classical_channel() {
        let r = run_src("dims 2 2\nrho R = classical_corr\nanalyze R").unwrap();
        let Section::Analysis(a) = &r.sections[0] else {
            panic!()
        };
        let expected = [0.25, 0.25, 0.0, 0.0];
        for (v, e) in a.eigenvalues.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(a.rank, 2);
        assert!(!a.is_product && !a.product_test);
    }

    #[test]
    fn analyze_kron_of_single_states() {
        let r = run_src(
            "ket a = |0>\nket b = (1+0i)|0> + (0+1i)|1>\nrho P = kron(proj(a), proj(b))\nanalyze P",
        )
        .unwrap();
        let Section::Analysis(a) = &r.sections[0] else {
            panic!()
        };
        assert_eq!(a.rank, 1);
        assert!(a.is_product && a.product_test);
    }

    #[test]
    fn normalized_ket_reproduces_bell_analysis() {
        let r = run_src("ket k = (0.7071+0i)|0,0> + (0.7071+0i)|1,1>\nrho R = proj(k)\nanalyze R")
            .unwrap();
        let Section::Analysis(a) = &r.sections[0] else {
            panic!()
        };
        assert_eq!(a.rank, 4);
        assert!((a.purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn teleport_classical_channel() {
        let r = run_src("rho R = classical_corr\nteleport R with 0.6 0.8").unwrap();
        let Section::Teleport(t) = &r.sections[0] else {
            panic!()
        };
        assert_eq!(t.outcomes.len(), 4);
        for o in &t.outcomes {
            assert!((o.probability - 0.25).abs() < 1e-12);
            let m = o.post_state_b.as_ref().unwrap().matrix();
            assert!(m[(0, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn mixture_of_products_matches_classical_channel() {
        let src = "ket a1 = |0>\nket a2 = |1>\nrho M = mix 0.5 kron(proj(a1), proj(a1)) 0.5 kron(proj(a2), proj(a2))";
        let p = parse_state_spec(src).unwrap();
        let m = evaluate_named(&p, "M").unwrap();
        assert!(m.matrix().max_abs_diff(classical_corr_channel().matrix()) < 1e-15);
    }

    #[test]
    fn state_errors_carry_statement_location() {
        let err = run_src("rho R = bell\nteleport R with 0.7 0.7").unwrap_err();
        assert_eq!(err.span.line, 2);
        assert!(matches!(err.source, densig_core::Error::State(_)));

        let err = run_src("rho R = mix 0.3 bell 0.8 classical_corr\nanalyze R").unwrap_err();
        assert!(matches!(err.source, densig_core::Error::Weight(_)));

        let err =
            run_src("rho R = matrix [1, 0, 0, 0; 0, 0, 0, 0; 0, 0, 0, 0; 0, 0, 0, 1]\nanalyze R")
                .unwrap_err();
        assert!(matches!(err.source, densig_core::Error::State(_)));
    }

    #[test]
    fn empty_action_list_gives_only_validation() {
        let r = run_src("dims 2 2\nrho R = bell").unwrap();
        assert!(r.sections.is_empty());
        assert_eq!(r.validation.rhos, vec!["R".to_string()]);
        assert_eq!(r.validation.actions, 0);
    }

    #[test]
    fn tripartite_reduction_in_larger_dims() {
        let r = run_src("dims 3 3\nrho T = tripartite(0.2, 0.3, 0.5).BC\nanalyze T").unwrap();
        let Section::Analysis(a) = &r.sections[0] else {
            panic!()
        };
        assert_eq!(a.rank, 3);
    }
}
