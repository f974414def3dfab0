//! Law checks with generated inputs, plus deterministic companions where the
//! quantifier is small enough to exhaust.
//!
//! Coverage, by layer:
//!
//! * numeric kernel — Kronecker index bookkeeping (associativity, dagger
//!   compatibility), positive-semidefinite factoring round trips, and the
//!   channel/rearrangement index maps inverting each other;
//! * backends — dagger-compact axioms in FHilb and Rel at small sizes:
//!   involutive contravariant dagger, bifunctorial tensor, snake equations,
//!   naturality of the symmetry;
//! * algebras — the star operation is involutive and antimultiplicative on
//!   sampled points of every bundled algebra, copyable points of commutative
//!   algebras are pairwise orthogonal, and the full-matrix normaliser squares
//!   to the inverse dimension;
//! * certified wrappers — composition, dagger, and tensor of certified
//!   completely positive morphisms recertify, and the doubled-carrier check
//!   matches the algebra-side check;
//! * classical fragment — stochastic matrices round-trip through morphisms,
//!   and measuring any state yields a genuine probability distribution;
//! * splitting — sandwiching by the representation idempotent always lands
//!   in the split image, the compression inverts the embedding there, and at
//!   the smallest relational size the whole equivalence is checked
//!   exhaustively rather than sampled.

use std::sync::OnceLock;

use cpstar_core::backends::{cap, cup, swap, Backend, Morphism, ObjectRef, Relation};
use cpstar_core::classify::{wedderburn, FactorDecomposition};
use cpstar_core::corpus;
use cpstar_core::cpm::{check_cpm, CpmObject};
use cpstar_core::cpstar::{
    check_cpstar, compose_cp, dagger_cp, random_cp_morphism, tensor_cp, CpStarMorphism,
    CpStarObject,
};
use cpstar_core::frobenius::FrobeniusAlgebra;
use cpstar_core::numeric::{
    is_psd, kron, psd_factor, reshuffle, reshuffle_inv, Complex64, ComplexMatrix, Tolerance,
};
use cpstar_core::splitdag::{
    central_sqrt, compress_split, functor_f_object, split_membership, transport_pair,
};
use cpstar_core::stoch::{born, from_stochastic_matrix, operator_point, to_stochastic_matrix, StochObject};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn fhilb(n: usize) -> ObjectRef {
    ObjectRef::new(Backend::FHilb, n)
}

fn rel(n: usize) -> ObjectRef {
    ObjectRef::new(Backend::Rel, n)
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

/// A complex matrix of the given shape with entries in the unit square.
fn matrix_with(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |entries| {
        ComplexMatrix::from_fn(rows, cols, |r, c| {
            let (re, im) = entries[r * cols + c];
            Complex64::new(re, im)
        })
    })
}

/// A linear map `n → m` as an FHilb morphism.
fn linear_map(n: usize, m: usize) -> impl Strategy<Value = Morphism> {
    matrix_with(m, n).prop_map(move |mat| Morphism::from_matrix(n, m, mat).expect("shape fixed"))
}

/// A relation `n → m` as a Rel morphism, each pair present independently.
fn relational_map(n: usize, m: usize) -> impl Strategy<Value = Morphism> {
    prop::collection::vec(any::<bool>(), n * m).prop_map(move |flags| {
        let pairs = (0..n * m).filter(|&i| flags[i]).map(|i| (i / m, i % m));
        Morphism::from_relation(Relation::new(n, m, pairs).expect("indices in range"))
    })
}

/// A composable FHilb pair `f : n → m`, `g : m → k` with all dims ≤ 3.
fn linear_pair() -> impl Strategy<Value = (Morphism, Morphism)> {
    (1usize..=3, 1usize..=3, 1usize..=3)
        .prop_flat_map(|(n, m, k)| (linear_map(n, m), linear_map(m, k)))
}

/// A composable Rel pair with all set sizes ≤ 4.
fn relational_pair() -> impl Strategy<Value = (Morphism, Morphism)> {
    (1usize..=4, 1usize..=4, 1usize..=4)
        .prop_flat_map(|(n, m, k)| (relational_map(n, m), relational_map(m, k)))
}

// ---------------------------------------------------------------------------
// Shared fixtures (built once; every property reads them immutably)
// ---------------------------------------------------------------------------

static ALGEBRAS: OnceLock<Vec<(String, FrobeniusAlgebra)>> = OnceLock::new();

fn bundled_algebras() -> &'static [(String, FrobeniusAlgebra)] {
    ALGEBRAS
        .get_or_init(|| corpus::standard_algebras(tol()).expect("bundled algebras build"))
        .as_slice()
}

/// Small objects for the certified-closure property: carrier dimension ≤ 5.
static CLOSURE_POOL: OnceLock<Vec<(CpStarObject, FactorDecomposition)>> = OnceLock::new();

fn closure_pool() -> &'static [(CpStarObject, FactorDecomposition)] {
    CLOSURE_POOL
        .get_or_init(|| {
            [
                corpus::pants_fhilb(1, tol()).expect("full matrix algebra on C¹"),
                cpstar_core::frobenius::diagonal_algebra(2, tol()).expect("two-outcome algebra"),
                cpstar_core::frobenius::diagonal_algebra(3, tol()).expect("three-outcome algebra"),
                corpus::pants_fhilb(2, tol()).expect("full matrix algebra on C²"),
                corpus::c_plus_m2(tol()).expect("mixed-block algebra"),
            ]
            .into_iter()
            .map(|alg| {
                let dec = wedderburn(&alg, tol()).expect("decomposition");
                let obj = CpStarObject::new(alg, tol()).expect("normaliser");
                (obj, dec)
            })
            .collect()
        })
        .as_slice()
}

/// The doubled host used by the splitting properties: the full matrix algebra
/// on C², its representation idempotent, and the isometric transport pair.
struct SplitHost {
    object: CpStarObject,
    idem: cpstar_core::splitdag::DaggerIdempotent,
    compress_in: Morphism,
    expand_out: Morphism,
}

static SPLIT_HOST: OnceLock<SplitHost> = OnceLock::new();

fn split_host() -> &'static SplitHost {
    SPLIT_HOST.get_or_init(|| {
        let object = CpStarObject::new(
            corpus::pants_fhilb(2, tol()).expect("full matrix algebra on C²"),
            tol(),
        )
        .expect("normaliser");
        let idem = functor_f_object(&object, tol()).expect("representation idempotent");
        let (compress_in, expand_out) = transport_pair(&object, tol()).expect("transport pair");
        SplitHost { object, idem, compress_in, expand_out }
    })
}

/// Build a point of the algebra from generic raw material: complex
/// coefficients for a linear algebra, a bitmask subset for a relational one.
fn point_for(alg: &FrobeniusAlgebra, coords: &[(f64, f64)], bits: u64) -> Morphism {
    let n = alg.dim();
    match alg.backend() {
        Backend::FHilb => {
            let coeffs: Vec<Complex64> =
                (0..n).map(|i| Complex64::new(coords[i].0, coords[i].1)).collect();
            Morphism::point(&coeffs)
        }
        Backend::Rel => {
            let subset: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
            Morphism::point_rel(n, subset).expect("subset point")
        }
    }
}

// ---------------------------------------------------------------------------
// Numeric kernel
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(
        a in (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| matrix_with(r, c)),
        b in (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| matrix_with(r, c)),
        c in (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| matrix_with(r, c)),
    ) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn kron_commutes_with_dagger(
        a in (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| matrix_with(r, c)),
        b in (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| matrix_with(r, c)),
    ) {
        prop_assert!(kron(&a, &b).dagger().approx_eq(&kron(&a.dagger(), &b.dagger()), 0.0));
    }

    #[test]
    fn psd_factor_reconstructs_its_input(
        g in (1usize..=4).prop_flat_map(|n| matrix_with(n, n)),
    ) {
        let a = g.dagger().matmul(&g).expect("square product");
        prop_assert!(is_psd(&a, tol()).is_psd);
        let h = psd_factor(&a, tol()).expect("factoring a Gram matrix");
        let back = h.dagger().matmul(&h).expect("square product");
        prop_assert!(back.approx_eq(&a, 1e-9 * a.norm_inf().max(1.0)));
    }

    #[test]
    fn rearrangement_is_inverted_exactly(
        (dims, h) in (1usize..=3, 1usize..=3)
            .prop_flat_map(|(n, m)| (Just((n, m)), matrix_with(m * m, n * n))),
    ) {
        let c = reshuffle(&h, dims).expect("shape fixed");
        let back = reshuffle_inv(&c, dims).expect("shape fixed");
        prop_assert!(back.approx_eq(&h, 0.0));
    }
}

// ---------------------------------------------------------------------------
// Dagger-compact axioms, both backends
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dagger_is_involutive_on_linear_maps(
        f in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| linear_map(n, m)),
    ) {
        prop_assert!(f.dagger().dagger().equal(&f, tol()));
    }

    #[test]
    fn dagger_is_involutive_on_relations(
        f in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| relational_map(n, m)),
    ) {
        prop_assert!(f.dagger().dagger().equal(&f, tol()));
    }

    #[test]
    fn dagger_reverses_linear_composition((f, g) in linear_pair()) {
        let lhs = f.then(&g).expect("composable").dagger();
        let rhs = g.dagger().then(&f.dagger()).expect("composable");
        prop_assert!(lhs.equal(&rhs, tol()));
    }

    #[test]
    fn dagger_reverses_relational_composition((f, g) in relational_pair()) {
        let lhs = f.then(&g).expect("composable").dagger();
        let rhs = g.dagger().then(&f.dagger()).expect("composable");
        prop_assert!(lhs.equal(&rhs, tol()));
    }

    #[test]
    fn tensor_is_bifunctorial_on_linear_maps(
        (f, f2) in linear_pair(),
        (g, g2) in linear_pair(),
    ) {
        let composed_then_tensored = f
            .then(&f2)
            .expect("composable")
            .tensor(&g.then(&g2).expect("composable"))
            .expect("same backend");
        let tensored_then_composed = f
            .tensor(&g)
            .expect("same backend")
            .then(&f2.tensor(&g2).expect("same backend"))
            .expect("composable");
        let scale = composed_then_tensored.matrix().expect("linear").norm_inf().max(1.0);
        prop_assert!(
            composed_then_tensored
                .matrix()
                .expect("linear")
                .approx_eq(tensored_then_composed.matrix().expect("linear"), 1e-12 * scale)
        );
    }

    #[test]
    fn tensor_is_bifunctorial_on_relations(
        (f, f2) in relational_pair(),
        (g, g2) in relational_pair(),
    ) {
        let composed_then_tensored = f
            .then(&f2)
            .expect("composable")
            .tensor(&g.then(&g2).expect("composable"))
            .expect("same backend");
        let tensored_then_composed = f
            .tensor(&g)
            .expect("same backend")
            .then(&f2.tensor(&g2).expect("same backend"))
            .expect("composable");
        prop_assert!(composed_then_tensored.equal(&tensored_then_composed, tol()));
    }

    #[test]
    fn swap_is_natural_on_linear_maps(
        f in (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| linear_map(n, m)),
        g in (1usize..=3, 1usize..=3).prop_flat_map(|(n, m)| linear_map(n, m)),
    ) {
        let lhs = f
            .tensor(&g)
            .expect("same backend")
            .then(&swap(f.target, g.target).expect("same backend"))
            .expect("composable");
        let rhs = swap(f.source, g.source)
            .expect("same backend")
            .then(&g.tensor(&f).expect("same backend"))
            .expect("composable");
        prop_assert!(lhs.equal(&rhs, tol()));
    }

    #[test]
    fn swap_is_natural_on_relations(
        f in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| relational_map(n, m)),
        g in (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| relational_map(n, m)),
    ) {
        let lhs = f
            .tensor(&g)
            .expect("same backend")
            .then(&swap(f.target, g.target).expect("same backend"))
            .expect("composable");
        let rhs = swap(f.source, g.source)
            .expect("same backend")
            .then(&g.tensor(&f).expect("same backend"))
            .expect("composable");
        prop_assert!(lhs.equal(&rhs, tol()));
    }
}

/// Both zig-zag composites built from the cup and its dagger are the
/// identity, for every object of either backend up to size four.
#[test]
fn snake_equations_hold_in_both_backends() {
    for make in [fhilb as fn(usize) -> ObjectRef, rel as fn(usize) -> ObjectRef] {
        for n in 1..=4 {
            let x = make(n);
            let id = Morphism::identity(x);
            let left = id
                .tensor(&cup(x))
                .expect("same backend")
                .then(&cap(x).tensor(&id).expect("same backend"))
                .expect("composable");
            let right = cup(x)
                .tensor(&id)
                .expect("same backend")
                .then(&id.tensor(&cap(x)).expect("same backend"))
                .expect("composable");
            assert!(left.equal(&id, tol()), "bent-right zig-zag fails on {x:?}");
            assert!(right.equal(&id, tol()), "bent-left zig-zag fails on {x:?}");
        }
    }
}

// ---------------------------------------------------------------------------
// Algebraic laws of the bundled algebras
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_is_involutive_and_antimultiplicative(
        which in any::<prop::sample::Index>(),
        coords in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        more in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
        bits in any::<u64>(),
    ) {
        let (_, alg) = &bundled_algebras()[which.index(bundled_algebras().len())];
        let x = point_for(alg, &coords, bits);
        let y = point_for(alg, &more, bits.rotate_left(17));

        let twice = alg.star_point(&alg.star_point(&x).expect("star")).expect("star");
        prop_assert!(twice.equal(&x, tol()));

        let product_starred = alg
            .star_point(&alg.mult_points(&x, &y).expect("points multiply"))
            .expect("star");
        let reversed_product = alg
            .mult_points(
                &alg.star_point(&y).expect("star"),
                &alg.star_point(&x).expect("star"),
            )
            .expect("points multiply");
        prop_assert!(product_starred.equal(&reversed_product, tol()));
    }
}

/// Copyable points of the commutative linear algebras are pairwise
/// orthogonal (distinct characters of a commutative algebra always are).
#[test]
fn copyable_points_of_commutative_algebras_are_orthogonal() {
    for (name, alg) in bundled_algebras() {
        if alg.backend() != Backend::FHilb {
            continue;
        }
        let sigma = swap(alg.carrier(), alg.carrier()).expect("same backend");
        let commutative = sigma.then(alg.mult()).expect("composable").equal(alg.mult(), tol());
        if !commutative {
            continue;
        }
        let points = alg.copyable_points(tol(), 0x0c0_ffee).expect("copyable points");
        assert_eq!(points.len(), alg.dim(), "{name}: commutative algebras have a full basis");
        for (i, p) in points.iter().enumerate() {
            for q in points.iter().skip(i + 1) {
                let overlap = cpstar_core::backends::inner(p, q).expect("inner product");
                assert!(
                    overlap.norm() <= 1e-8,
                    "{name}: copyable points {i} and later overlap by {overlap}"
                );
            }
        }
    }
}

/// On the full matrix algebra over an `n`-dimensional space the normaliser
/// squares to `1/n` times the identity, in both backends (where for
/// relations the normaliser is the identity itself).
#[test]
fn full_matrix_normaliser_squares_to_inverse_dimension() {
    for n in 1..=4 {
        let alg = corpus::pants_fhilb(n, tol()).expect("full matrix algebra");
        let z = alg.solve_normaliser(tol()).expect("normaliser");
        let squared = z.then(&z).expect("composable");
        let expected = Morphism::from_matrix(
            alg.dim(),
            alg.dim(),
            ComplexMatrix::identity(alg.dim()).scale(Complex64::new(1.0 / n as f64, 0.0)),
        )
        .expect("shape fixed");
        assert!(squared.equal(&expected, tol()), "dimension {n}");

        let rel_alg = corpus::pants_rel(n, tol()).expect("relational counterpart");
        let rel_z = rel_alg.solve_normaliser(tol()).expect("normaliser");
        assert!(rel_z.equal(&Morphism::identity(rel_alg.carrier()), tol()));
    }
}

/// Every bundled algebra admits a square root of the squared normaliser, and
/// the blockwise-positive root recovers the normaliser itself.
#[test]
fn squared_normalisers_have_central_roots_across_the_corpus() {
    for (name, alg) in bundled_algebras() {
        let z = alg.solve_normaliser(tol()).expect("normaliser");
        let squared = z.then(&z).expect("composable");
        let root = central_sqrt(alg, &squared, tol())
            .unwrap_or_else(|e| panic!("{name}: central square root should exist: {e}"));
        assert!(
            root.then(&root).expect("composable").equal(&squared, tol()),
            "{name}: root does not square back"
        );
        if alg.backend() == Backend::FHilb {
            let scale = z.matrix().expect("linear").norm_inf().max(1.0);
            assert!(
                root.matrix()
                    .expect("linear")
                    .approx_eq(z.matrix().expect("linear"), 1e-8 * scale),
                "{name}: positive root differs from the normaliser"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Certified wrappers
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn certified_morphisms_close_under_the_categorical_operations(
        seed in any::<u64>(),
        pick in 0usize..4,
    ) {
        let pool = closure_pool();
        // (source, middle, target) triples over the small pool, chosen so the
        // largest certified composite stays cheap to recheck.
        let (ai, bi, ci) = [(0, 1, 3), (2, 3, 1), (4, 1, 0), (0, 3, 2)][pick];
        let (a, dec_a) = &pool[ai];
        let (b, dec_b) = &pool[bi];
        let (c, dec_c) = &pool[ci];

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_cp_morphism(dec_a, dec_b, &mut rng).expect("positive sample");
        let g = random_cp_morphism(dec_b, dec_c, &mut rng).expect("positive sample");

        let f = CpStarMorphism::new(f, a, b, tol()).expect("sample certifies");
        let g = CpStarMorphism::new(g, b, c, tol()).expect("sample certifies");

        prop_assert!(compose_cp(&g, &f, tol()).is_ok());
        prop_assert!(dagger_cp(&f, tol()).is_ok());

        // Tensor closure, kept to two-outcome factors so the product algebra
        // stays four-dimensional.
        let (d2, dec_d2) = &pool[1];
        let s = random_cp_morphism(dec_d2, dec_d2, &mut rng).expect("positive sample");
        let t = random_cp_morphism(dec_d2, dec_d2, &mut rng).expect("positive sample");
        let s = CpStarMorphism::new(s, d2, d2, tol()).expect("sample certifies");
        let t = CpStarMorphism::new(t, d2, d2, tol()).expect("sample certifies");
        prop_assert!(tensor_cp(&s, &t, tol()).is_ok());
    }

    #[test]
    fn doubled_and_algebra_side_checks_agree_on_full_matrix_algebras(
        seed in any::<u64>(),
        cp in any::<bool>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = closure_pool();
        let (pants2, dec) = &pool[3];
        let h = if cp {
            random_cp_morphism(dec, dec, &mut rng).expect("positive sample")
        } else {
            cpstar_core::cpstar::random_morphism(4, 4, &mut rng).expect("raw sample")
        };
        let x = CpmObject::new(fhilb(2));
        let via_carrier = check_cpm(&h, &x, &x, tol()).expect("shape fits").is_accept();
        let via_algebra =
            check_cpstar(&h, pants2.algebra(), pants2.algebra(), tol()).expect("shape fits").is_accept();
        prop_assert_eq!(via_carrier, via_algebra);
    }
}

// ---------------------------------------------------------------------------
// Classical fragment
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn stochastic_matrices_round_trip(
        (n, m, raw) in (1usize..=4, 1usize..=4)
            .prop_flat_map(|(n, m)| (Just(n), Just(m), prop::collection::vec(0.0f64..1.0, n * m))),
    ) {
        // Bound entries away from zero so every column has positive mass.
        let mut w = ComplexMatrix::from_fn(m, n, |r, c| {
            Complex64::new(raw[r * n + c] + 1e-3, 0.0)
        });
        for col in 0..n {
            let total: f64 = (0..m).map(|row| w.get(row, col).re).sum();
            for row in 0..m {
                let v = w.get(row, col);
                w.set(row, col, v / Complex64::new(total, 0.0));
            }
        }

        let source = StochObject::new(
            CpStarObject::new(
                cpstar_core::frobenius::diagonal_algebra(n, tol()).expect("outcome algebra"),
                tol(),
            )
            .expect("normaliser"),
            tol(),
        )
        .expect("classical object");
        let target = StochObject::new(
            CpStarObject::new(
                cpstar_core::frobenius::diagonal_algebra(m, tol()).expect("outcome algebra"),
                tol(),
            )
            .expect("normaliser"),
            tol(),
        )
        .expect("classical object");

        let f = from_stochastic_matrix(&w, &source, &target, tol()).expect("stochastic input");
        let back = to_stochastic_matrix(&f, &source, &target, tol()).expect("round trip");
        prop_assert!(back.approx_eq(&w, 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn measuring_any_state_yields_a_distribution(
        which in any::<prop::sample::Index>(),
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9),
    ) {
        let measurements = corpus::measurement_corpus().expect("bundled measurements");
        let (_, m) = &measurements[which.index(measurements.len())];
        let side = (m.source.dim as f64).sqrt().round() as usize;
        let outcomes = m.target.dim;

        let source = CpStarObject::new(
            corpus::pants_fhilb(side, tol()).expect("full matrix algebra"),
            tol(),
        )
        .expect("normaliser");
        let target_alg =
            cpstar_core::frobenius::diagonal_algebra(outcomes, tol()).expect("outcome algebra");
        let target = CpStarObject::new(target_alg, tol()).expect("normaliser");
        let measurement =
            CpStarMorphism::new(m.clone(), &source, &target, tol()).expect("bundled channels certify");
        let classical = StochObject::new(target, tol()).expect("classical object");

        // A generic density operator: normalised Gram matrix of a random map.
        let g = ComplexMatrix::from_fn(side, side, |r, c| {
            let (re, im) = raw[r * side + c];
            Complex64::new(re, im)
        });
        let mut rho = g.dagger().matmul(&g).expect("square product");
        let trace = rho.trace().re.max(1e-6);
        rho = rho.scale(Complex64::new(1.0 / trace, 0.0));
        let state = operator_point(&rho).expect("vectorised state");

        let dist = born(&measurement, &state, &classical, tol()).expect("distribution");
        let total: f64 = dist.weights().iter().sum();
        prop_assert!(dist.weights().iter().all(|w| *w >= -1e-9));
        prop_assert!((total - 1.0).abs() <= 1e-9);
    }
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sandwiching_by_the_idempotent_lands_in_the_split_image(
        h in linear_map(16, 16),
    ) {
        let host = split_host();
        let p = host.idem.morphism();
        let sandwiched = p.then(&h).expect("composable").then(p).expect("composable");
        prop_assert!(split_membership(&sandwiched, &host.idem, &host.idem, tol())
            .expect("shape fits"));

        // Compressing a member and re-embedding it reproduces the member.
        let recovered = compress_split(&sandwiched, &host.object, &host.object, tol())
            .expect("shape fits");
        let back = host
            .expand_out
            .then(&recovered)
            .expect("composable")
            .then(&host.compress_in)
            .expect("composable");
        let scale = sandwiched.matrix().expect("linear").norm_inf().max(1.0);
        prop_assert!(back
            .matrix()
            .expect("linear")
            .approx_eq(sandwiched.matrix().expect("linear"), 1e-9 * scale));
    }
}

/// At the smallest relational size the splitting equivalence can be checked
/// without sampling: for *every* relation `h` on the doubled two-element
/// carrier, membership in the split image coincides with being reproduced by
/// the embedding, and on members the doubled-carrier positivity check agrees
/// with the algebra-side check of the compression.
#[test]
fn relational_splitting_equivalence_is_exhaustive_at_size_two() {
    let object = CpStarObject::new(
        corpus::groupoid_algebra_rel(&cpstar_core::classify::Groupoid::cyclic(2), tol())
            .expect("relational group algebra on two elements"),
        tol(),
    )
    .expect("normaliser");
    let idem = functor_f_object(&object, tol()).expect("representation idempotent");
    let (u, v) = transport_pair(&object, tol()).expect("transport pair");
    let x = CpmObject::new(rel(2));

    let mut members = 0usize;
    let mut accepted = 0usize;
    for mask in 0u32..(1 << 16) {
        let pairs = (0..16).filter(|i| mask >> i & 1 == 1).map(|i| (i / 4, i % 4));
        let h = Morphism::from_relation(Relation::new(4, 4, pairs).expect("indices in range"));

        let member = split_membership(&h, &idem, &idem, tol()).expect("shape fits");
        let compressed = compress_split(&h, &object, &object, tol()).expect("shape fits");
        let reproduced = v
            .then(&compressed)
            .expect("composable")
            .then(&u)
            .expect("composable")
            .equal(&h, tol());
        assert_eq!(member, reproduced, "membership mismatch at mask {mask:#06x}");

        if member {
            members += 1;
            let carrier_side = check_cpm(&h, &x, &x, tol()).expect("shape fits").is_accept();
            let algebra_side = check_cpstar(&compressed, object.algebra(), object.algebra(), tol())
                .expect("shape fits")
                .is_accept();
            assert_eq!(
                carrier_side, algebra_side,
                "positivity checks disagree at mask {mask:#06x}"
            );
            if carrier_side {
                accepted += 1;
            }
        }
    }
    assert!(members > 0, "no relation landed in the split image");
    assert!(accepted > 0, "no member passed the positivity checks");
    assert!(accepted < members, "the positivity check never rejected a member");
}
