//! Partitions of the Berkovich line by one or two type-II vertices,
//! quantized local degrees and pullbacks, projections, the balance test,
//! the translation between measure pairs on `P^1(C)` and quantized
//! measures, and witness construction for the limit set description.
//!
//! Masses are exact nonnegative rationals. A measure carries an explicit
//! `leftover` for unattributed mass so truncated approximations compose
//! with the exact operators; balance checks degrade to residual bounds
//! proportional to the leftover.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebraic::ResidueValue;
use crate::dynamics::GaussOrbit;
use crate::error::{AdmissibilityBranch, CoreError, Result};
use crate::geometry::{direction_at, DirectionTarget, TypeIIPoint};
use crate::reduction::{RationalMapC, ReducedMap};
use crate::scalar::{rat_string, Rat};

/// A cell of the partition `S(Γ)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    /// The singleton `{S_G}`.
    GaussVertex,
    /// The singleton `{f^n(S_G)}` (two-vertex partitions only).
    ImageVertex,
    /// A direction ball at `S_G` other than the one toward the image vertex.
    GaussDir(ResidueValue),
    /// A direction ball at `f^n(S_G)` other than the one toward `S_G`,
    /// labelled in the image point's canonical chart.
    ImageDir(ResidueValue),
    /// The annulus `U_{→S_G S_n} ∩ U_{→S_n S_G}` between the two vertices.
    Annulus,
}

impl Cell {
    fn rank(&self) -> u8 {
        match self {
            Cell::GaussVertex => 0,
            Cell::GaussDir(_) => 1,
            Cell::Annulus => 2,
            Cell::ImageVertex => 3,
            Cell::ImageDir(_) => 4,
        }
    }

    fn canonical_cmp(&self, other: &Cell) -> core::cmp::Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (Cell::GaussDir(a), Cell::GaussDir(b)) | (Cell::ImageDir(a), Cell::ImageDir(b)) => {
                a.canonical_cmp(b)
            }
            _ => core::cmp::Ordering::Equal,
        })
    }

    pub fn descriptor(&self) -> String {
        match self {
            Cell::GaussVertex => String::from("{S_G}"),
            Cell::ImageVertex => String::from("{S_n}"),
            Cell::GaussDir(v) => format!("U(S_G; {})", v.to_string_short()),
            Cell::ImageDir(v) => format!("U(S_n; {})", v.to_string_short()),
            Cell::Annulus => String::from("annulus"),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

/// The vertex data of `Γ_G` or `Γ_{f^n}`.
#[derive(Clone, Debug, PartialEq)]
pub enum PartitionGamma {
    /// `Γ_G = {S_G}`.
    Gauss,
    /// `Γ_{f^n} = {S_G, S_n}` with `S_n ≠ S_G`.
    Pair {
        level: usize,
        image: TypeIIPoint,
        /// label at `S_G` of the direction toward `S_n`
        toward_image: ResidueValue,
        /// label at `S_n` (canonical chart) of the direction toward `S_G`
        toward_gauss: ResidueValue,
    },
}

impl PartitionGamma {
    pub fn gauss() -> Self {
        PartitionGamma::Gauss
    }

    /// `Γ_{f^n}` from a computed orbit; collapses to `Γ_G` when
    /// `f^n(S_G) = S_G`.
    pub fn from_orbit(orbit: &GaussOrbit, n: usize) -> Result<Self> {
        let image = orbit.point(n)?.clone();
        if n == 0 || image.is_gauss() {
            return Ok(PartitionGamma::Gauss);
        }
        let gauss = TypeIIPoint::gauss();
        let toward_image = direction_at(&gauss, &DirectionTarget::Disk(image.clone()))?.value;
        let toward_gauss = direction_at(&image, &DirectionTarget::Disk(gauss))?.value;
        Ok(PartitionGamma::Pair { level: n, image, toward_image, toward_gauss })
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, PartitionGamma::Pair { .. })
    }

    pub fn toward_image(&self) -> Option<&ResidueValue> {
        match self {
            PartitionGamma::Pair { toward_image, .. } => Some(toward_image),
            PartitionGamma::Gauss => None,
        }
    }

    pub fn toward_gauss(&self) -> Option<&ResidueValue> {
        match self {
            PartitionGamma::Pair { toward_gauss, .. } => Some(toward_gauss),
            PartitionGamma::Gauss => None,
        }
    }

    /// Is the cell a member of this partition's enumeration?
    pub fn admits(&self, cell: &Cell) -> bool {
        match self {
            PartitionGamma::Gauss => {
                matches!(cell, Cell::GaussVertex | Cell::GaussDir(_))
            }
            PartitionGamma::Pair { toward_image, toward_gauss, .. } => match cell {
                Cell::GaussVertex | Cell::ImageVertex | Cell::Annulus => true,
                Cell::GaussDir(v) => v != toward_image,
                Cell::ImageDir(v) => v != toward_gauss,
            },
        }
    }
}

/// A nonnegative finitely-supported mass assignment on the cells of a
/// partition, with explicit leftover mass.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedMeasure {
    gamma: PartitionGamma,
    masses: Vec<(Cell, Rat)>,
    leftover: Rat,
}

impl QuantizedMeasure {
    pub fn zero(gamma: PartitionGamma) -> Self {
        QuantizedMeasure { gamma, masses: Vec::new(), leftover: Rat::zero() }
    }

    pub fn gamma(&self) -> &PartitionGamma {
        &self.gamma
    }

    pub fn leftover(&self) -> &Rat {
        &self.leftover
    }

    pub fn set_leftover(&mut self, leftover: Rat) -> Result<()> {
        if leftover.is_negative() {
            return Err(CoreError::CellMismatch(String::from("negative leftover")));
        }
        self.leftover = leftover;
        Ok(())
    }

    pub fn add_mass(&mut self, cell: Cell, mass: Rat) -> Result<()> {
        if mass.is_negative() {
            return Err(CoreError::CellMismatch(format!(
                "negative mass {} on {}",
                rat_string(&mass),
                cell.descriptor()
            )));
        }
        if !self.gamma.admits(&cell) {
            return Err(CoreError::CellMismatch(format!(
                "cell {} does not belong to the partition",
                cell.descriptor()
            )));
        }
        if mass.is_zero() {
            return Ok(());
        }
        for (c, m) in self.masses.iter_mut() {
            if *c == cell {
                *m += mass;
                return Ok(());
            }
        }
        self.masses.push((cell, mass));
        Ok(())
    }

    pub fn mass_of(&self, cell: &Cell) -> Rat {
        self.masses
            .iter()
            .find(|(c, _)| c == cell)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Attributed + leftover mass.
    pub fn total(&self) -> Rat {
        self.masses.iter().fold(self.leftover.clone(), |acc, (_, m)| acc + m)
    }

    pub fn is_probability(&self) -> bool {
        self.total().is_one()
    }

    /// Membership in `M^1(Γ)†`: no vertex carries mass.
    pub fn is_dagger(&self) -> bool {
        self.mass_of(&Cell::GaussVertex).is_zero() && self.mass_of(&Cell::ImageVertex).is_zero()
    }

    /// Cells with nonzero mass, canonically sorted.
    pub fn support(&self) -> Vec<(Cell, Rat)> {
        let mut out = self.masses.clone();
        out.retain(|(_, m)| !m.is_zero());
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        out
    }

    pub fn scale(&self, c: &Rat) -> QuantizedMeasure {
        QuantizedMeasure {
            gamma: self.gamma.clone(),
            masses: self.masses.iter().map(|(cell, m)| (cell.clone(), m * c)).collect(),
            leftover: &self.leftover * c,
        }
    }

    /// Max cellwise difference against another measure on the same
    /// partition (vertex data must agree).
    pub fn max_residual(&self, other: &QuantizedMeasure) -> Result<Rat> {
        if self.gamma != other.gamma {
            return Err(CoreError::NotNested);
        }
        let mut worst = Rat::zero();
        for (cell, _) in self.masses.iter().chain(other.masses.iter()) {
            let d = (self.mass_of(cell) - other.mass_of(cell)).abs();
            if d > worst {
                worst = d;
            }
        }
        Ok(worst)
    }
}

/// Quantized local degree `m_{V,U}(f^n)` between a cell `V` of `Γ_{f^n}`
/// and a cell `U` of `Γ_G`.
pub fn quantized_local_degree(
    orbit: &GaussOrbit,
    n: usize,
    v_cell: &Cell,
    u_cell: &Cell,
) -> Result<BigInt> {
    let gamma = PartitionGamma::from_orbit(orbit, n)?;
    if !gamma.admits(v_cell) {
        return Err(CoreError::CellMismatch(format!(
            "{} is not a cell of the source partition",
            v_cell.descriptor()
        )));
    }
    match u_cell {
        Cell::GaussVertex => {
            let target_vertex =
                if gamma.is_pair() { Cell::ImageVertex } else { Cell::GaussVertex };
            if v_cell == &target_vertex {
                orbit.gauss_local_degree_of_iterate(n)
            } else {
                Ok(BigInt::zero())
            }
        }
        Cell::GaussDir(v) => {
            let dd = orbit.iterated_directional_data(v, n)?;
            if cell_inside_push(&gamma, v_cell, &dd.pushforward) {
                Ok(dd.m + dd.s)
            } else {
                Ok(dd.s)
            }
        }
        _ => Err(CoreError::CellMismatch(format!(
            "{} is not a cell of the Gauss partition",
            u_cell.descriptor()
        ))),
    }
}

/// Is the cell `V` of `Γ_{f^n}` contained in the direction ball
/// `U_{(f^n)_* v}` at the image vertex (labelled `push`)?
fn cell_inside_push(gamma: &PartitionGamma, v_cell: &Cell, push: &ResidueValue) -> bool {
    match gamma {
        PartitionGamma::Gauss => match v_cell {
            Cell::GaussDir(y) => y == push,
            _ => false,
        },
        PartitionGamma::Pair { toward_gauss, .. } => {
            if push == toward_gauss {
                // everything on the Gauss side of S_n
                matches!(v_cell, Cell::GaussVertex | Cell::GaussDir(_) | Cell::Annulus)
            } else {
                matches!(v_cell, Cell::ImageDir(y) if y == push)
            }
        }
    }
}

/// Direction at the image vertex containing the cell, `None` for the image
/// vertex itself.
fn cell_direction_at_image(gamma: &PartitionGamma, cell: &Cell) -> Option<ResidueValue> {
    match gamma {
        PartitionGamma::Gauss => match cell {
            Cell::GaussDir(y) => Some(y.clone()),
            _ => None,
        },
        PartitionGamma::Pair { toward_gauss, .. } => match cell {
            Cell::GaussVertex | Cell::GaussDir(_) | Cell::Annulus => Some(toward_gauss.clone()),
            Cell::ImageDir(y) => Some(y.clone()),
            Cell::ImageVertex => None,
        },
    }
}

/// Quantized pullback `(f^n)^* ω` from `Γ_{f^n}` to `Γ_G` (unnormalised:
/// total mass is `d^n` times the input's).
pub fn quantized_pullback(
    orbit: &GaussOrbit,
    n: usize,
    omega: &QuantizedMeasure,
) -> Result<QuantizedMeasure> {
    let gamma = PartitionGamma::from_orbit(orbit, n)?;
    if omega.gamma() != &gamma {
        return Err(CoreError::CellMismatch(String::from(
            "measure lives on a different partition",
        )));
    }
    let mut out = QuantizedMeasure::zero(PartitionGamma::Gauss);

    // vertex row: deg_{S_G}(f^n) times the image-vertex mass
    let vertex_cell = if gamma.is_pair() { Cell::ImageVertex } else { Cell::GaussVertex };
    let deg = Rat::from(orbit.gauss_local_degree_of_iterate(n)?);
    out.add_mass(Cell::GaussVertex, deg * omega.mass_of(&vertex_cell))?;

    // surplus contributions: s_v(f^n) times the total attributed mass
    let attributed = omega.total() - omega.leftover().clone();
    if !attributed.is_zero() {
        for (v, s) in orbit.surplus_support(n)? {
            out.add_mass(Cell::GaussDir(v), Rat::from(s) * &attributed)?;
        }
    }

    // directional matches: group cells by the image-vertex direction
    // containing them, then pull each group back through the label chains
    let mut toward: Vec<(ResidueValue, Rat)> = Vec::new();
    for (cell, mass) in omega.support() {
        if let Some(w) = cell_direction_at_image(&gamma, &cell) {
            let mut merged = false;
            for (k, m) in toward.iter_mut() {
                if *k == w {
                    *m += &mass;
                    merged = true;
                    break;
                }
            }
            if !merged {
                toward.push((w, mass));
            }
        }
    }
    for (w, mass) in toward {
        for (v, m_chain) in orbit.pullback_label_chain(&w, n)? {
            out.add_mass(Cell::GaussDir(v), Rat::from(m_chain) * &mass)?;
        }
    }

    // leftover scales by d^n, flagged by staying leftover
    let mut dn = Rat::one();
    for _ in 0..n {
        dn *= Rat::from(BigInt::from(orbit.degree()));
    }
    out.set_leftover(dn * omega.leftover().clone())?;
    Ok(out)
}

/// Projection `(π_{Γ_{f^n}, Γ_G})_* ω`: coarse cells aggregate their fine
/// cells; the whole image side lands in the direction toward the image.
pub fn project_to_gauss(omega: &QuantizedMeasure) -> Result<QuantizedMeasure> {
    let mut out = QuantizedMeasure::zero(PartitionGamma::Gauss);
    match omega.gamma() {
        PartitionGamma::Gauss => {
            for (cell, mass) in omega.support() {
                out.add_mass(cell, mass)?;
            }
        }
        PartitionGamma::Pair { toward_image, .. } => {
            for (cell, mass) in omega.support() {
                let coarse = match cell {
                    Cell::GaussVertex => Cell::GaussVertex,
                    Cell::GaussDir(x) => Cell::GaussDir(x),
                    Cell::ImageVertex | Cell::ImageDir(_) | Cell::Annulus => {
                        Cell::GaussDir(toward_image.clone())
                    }
                };
                out.add_mass(coarse, mass)?;
            }
        }
    }
    out.set_leftover(omega.leftover().clone())?;
    Ok(out)
}

/// General projection onto a coarser partition: only `Γ -> Γ` and
/// `Γ_{f^n} -> Γ_G` are nested.
pub fn project_measure(
    omega: &QuantizedMeasure,
    target: &PartitionGamma,
) -> Result<QuantizedMeasure> {
    if omega.gamma() == target {
        return Ok(omega.clone());
    }
    if matches!(target, PartitionGamma::Gauss) {
        return project_to_gauss(omega);
    }
    Err(CoreError::NotNested)
}

/// Balance report: exactness flag plus the max cell residual.
#[derive(Clone, Debug, PartialEq)]
pub struct BalanceReport {
    pub balanced: bool,
    pub max_residual: Rat,
    pub leftover_bound: Rat,
}

/// The quantized `f^n`-balanced property: `d^{-n} (f^n)^* ω` equals the
/// projection of `ω` to `Γ_G`, exactly when the leftover vanishes, within
/// the leftover otherwise.
pub fn quantized_balance_check(
    orbit: &GaussOrbit,
    n: usize,
    omega: &QuantizedMeasure,
) -> Result<BalanceReport> {
    let mut dn = Rat::one();
    for _ in 0..n {
        dn *= Rat::from(BigInt::from(orbit.degree()));
    }
    let pulled = quantized_pullback(orbit, n, omega)?.scale(&(Rat::one() / dn));
    let projected = project_to_gauss(omega)?;
    let residual = pulled.max_residual(&projected)?;
    let bound = omega.leftover().clone();
    let balanced =
        if bound.is_zero() { residual.is_zero() } else { residual <= bound };
    Ok(BalanceReport { balanced, max_residual: residual, leftover_bound: bound })
}

/// A purely atomic measure on `P^1(C)` with an explicit non-atomic scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicComplexMeasure {
    atoms: Vec<(ResidueValue, Rat)>,
    leftover: Rat,
}

impl AtomicComplexMeasure {
    pub fn new() -> Self {
        AtomicComplexMeasure { atoms: Vec::new(), leftover: Rat::zero() }
    }

    pub fn from_atoms(atoms: Vec<(ResidueValue, Rat)>) -> Result<Self> {
        let mut out = AtomicComplexMeasure::new();
        for (v, m) in atoms {
            out.add_atom(v, m)?;
        }
        Ok(out)
    }

    pub fn add_atom(&mut self, at: ResidueValue, mass: Rat) -> Result<()> {
        if mass.is_negative() {
            return Err(CoreError::CellMismatch(String::from("negative atom mass")));
        }
        if mass.is_zero() {
            return Ok(());
        }
        for (v, m) in self.atoms.iter_mut() {
            if *v == at {
                *m += mass;
                return Ok(());
            }
        }
        self.atoms.push((at, mass));
        Ok(())
    }

    pub fn set_leftover(&mut self, leftover: Rat) -> Result<()> {
        if leftover.is_negative() {
            return Err(CoreError::CellMismatch(String::from("negative non-atomic mass")));
        }
        self.leftover = leftover;
        Ok(())
    }

    pub fn leftover(&self) -> &Rat {
        &self.leftover
    }

    pub fn mass_at(&self, v: &ResidueValue) -> Rat {
        self.atoms
            .iter()
            .find(|(a, _)| a == v)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn total(&self) -> Rat {
        self.atoms.iter().fold(self.leftover.clone(), |acc, (_, m)| acc + m)
    }

    pub fn is_probability(&self) -> bool {
        self.total().is_one()
    }

    /// Atoms with nonzero mass, canonically sorted.
    pub fn support(&self) -> Vec<(ResidueValue, Rat)> {
        let mut out = self.atoms.clone();
        out.retain(|(_, m)| !m.is_zero());
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        out
    }

    pub fn scale(&self, c: &Rat) -> AtomicComplexMeasure {
        AtomicComplexMeasure {
            atoms: self.atoms.iter().map(|(v, m)| (v.clone(), m * c)).collect(),
            leftover: &self.leftover * c,
        }
    }

    pub fn approx_eq_exact(&self, other: &AtomicComplexMeasure) -> bool {
        if self.leftover != other.leftover {
            return false;
        }
        let sa = self.support();
        let sb = other.support();
        if sa.len() != sb.len() {
            return false;
        }
        sa.iter().all(|(v, m)| &other.mass_at(v) == m)
    }
}

impl Default for AtomicComplexMeasure {
    fn default() -> Self {
        AtomicComplexMeasure::new()
    }
}

/// Pullback of an atomic measure under a reduction `h~ = H·phi`:
/// `h~^* μ = phi^* μ + [H = 0]`, with `phi^* := 0` for constant `phi`.
pub fn reduced_pullback(r: &ReducedMap, mu: &AtomicComplexMeasure) -> Result<AtomicComplexMeasure> {
    let mut out = AtomicComplexMeasure::new();
    if !r.phi().is_constant() {
        for (w, mass) in mu.support() {
            for (v, m) in r.phi().preimages(&w)? {
                out.add_atom(v, Rat::from(BigInt::from(m)) * &mass)?;
            }
        }
        let deg_phi = Rat::from(BigInt::from(r.phi_degree()));
        out.set_leftover(deg_phi * mu.leftover().clone())?;
    }
    for (root, mult) in r.divisor_support() {
        out.add_atom(root.clone(), Rat::from(BigInt::from(*mult)))?;
    }
    Ok(out)
}

/// Pullback of an atomic measure under a degree-1 map over the residue
/// field (each point has exactly one preimage).
pub fn moebius_pullback(
    a_tilde: &RationalMapC,
    mu: &AtomicComplexMeasure,
) -> Result<AtomicComplexMeasure> {
    if a_tilde.degree() != 1 {
        return Err(CoreError::CellMismatch(String::from("expected a degree-1 reduction")));
    }
    let mut out = AtomicComplexMeasure::new();
    for (w, mass) in mu.support() {
        let pre = a_tilde.preimages(&w)?;
        for (v, m) in pre {
            out.add_atom(v, Rat::from(BigInt::from(m)) * &mass)?;
        }
    }
    out.set_leftover(mu.leftover().clone())?;
    Ok(out)
}

/// Pushforward under a degree-1 map.
pub fn moebius_pushforward(
    a_tilde: &RationalMapC,
    mu: &AtomicComplexMeasure,
) -> Result<AtomicComplexMeasure> {
    if a_tilde.degree() != 1 {
        return Err(CoreError::CellMismatch(String::from("expected a degree-1 reduction")));
    }
    let mut out = AtomicComplexMeasure::new();
    for (v, mass) in mu.support() {
        out.add_atom(a_tilde.eval_value(&v)?, mass)?;
    }
    out.set_leftover(mu.leftover().clone())?;
    Ok(out)
}

/// A pair of probability measures on `P^1(C)` subject to the admissibility
/// condition tied to the rescaling geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissiblePair {
    pub mu_c: AtomicComplexMeasure,
    pub mu_e: AtomicComplexMeasure,
}

/// The geometry of the level-1 rescaling: the partition `Γ_f`, and for the
/// distinct-vertex case the two special labels `h_A` (toward the image at
/// `S_G`) and `a_A` (toward `S_G` at the image); for the equal case, the
/// reduced rescaling `Ã ∈ PGL(2, C)` (identity for the canonical chart).
#[derive(Clone, Debug)]
pub struct RescalingGeometry {
    pub gamma: PartitionGamma,
    pub a_tilde: RationalMapC,
}

impl RescalingGeometry {
    pub fn from_orbit(orbit: &GaussOrbit) -> Result<Self> {
        let gamma = PartitionGamma::from_orbit(orbit, 1)?;
        // canonical A = chart(S_1)^{-1}; its reduction is the identity when
        // Γ_f = Γ_G, and is the constant a_A otherwise (not needed then)
        let a_tilde = RationalMapC::new(
            crate::poly::Poly::from_coeffs(vec![
                crate::scalar::Scalar::zero(),
                crate::scalar::Scalar::one(),
            ]),
            crate::poly::Poly::one(),
        )?;
        Ok(RescalingGeometry { gamma, a_tilde })
    }

    pub fn h_a(&self) -> Option<&ResidueValue> {
        self.gamma.toward_image()
    }

    pub fn a_a(&self) -> Option<&ResidueValue> {
        self.gamma.toward_gauss()
    }
}

/// Check the admissibility condition and translate an admissible pair into
/// the quantized measure `ω_μ` on `Γ_f`.
pub fn omega_from_mu(
    pair: &AdmissiblePair,
    geom: &RescalingGeometry,
) -> Result<QuantizedMeasure> {
    if !pair.mu_c.is_probability() || !pair.mu_e.is_probability() {
        return Err(CoreError::CellMismatch(String::from(
            "admissible pairs consist of probability measures",
        )));
    }
    match &geom.gamma {
        PartitionGamma::Gauss => {
            // admissibility: Ã^* μ_E = μ_C exactly
            let pulled = moebius_pullback(&geom.a_tilde, &pair.mu_e)?;
            if !pulled.approx_eq_exact(&pair.mu_c) {
                return Err(CoreError::NotAdmissible {
                    branch: AdmissibilityBranch::GammaEqual,
                    detail: String::from("Ã^* μ_E differs from μ_C"),
                });
            }
            let mut omega = QuantizedMeasure::zero(PartitionGamma::Gauss);
            omega.add_mass(Cell::GaussVertex, pair.mu_e.leftover().clone())?;
            for (y, mass) in pair.mu_c.support() {
                omega.add_mass(Cell::GaussDir(y), mass)?;
            }
            Ok(omega)
        }
        PartitionGamma::Pair { toward_image, toward_gauss, .. } => {
            let h_a = toward_image;
            let a_a = toward_gauss;
            let annulus_mass =
                pair.mu_c.mass_at(h_a) + pair.mu_e.mass_at(a_a) - Rat::one();
            if annulus_mass.is_negative() {
                return Err(CoreError::NotAdmissible {
                    branch: AdmissibilityBranch::GammaDistinct,
                    detail: format!(
                        "μ_C({{h_A}}) + μ_E({{a_A}}) = {} < 1",
                        rat_string(&(pair.mu_c.mass_at(h_a) + pair.mu_e.mass_at(a_a)))
                    ),
                });
            }
            let mut omega = QuantizedMeasure::zero(geom.gamma.clone());
            omega.add_mass(Cell::GaussVertex, pair.mu_c.leftover().clone())?;
            omega.add_mass(Cell::ImageVertex, pair.mu_e.leftover().clone())?;
            for (x, mass) in pair.mu_c.support() {
                if &x != h_a {
                    omega.add_mass(Cell::GaussDir(x), mass)?;
                }
            }
            for (y, mass) in pair.mu_e.support() {
                if &y != a_a {
                    omega.add_mass(Cell::ImageDir(y), mass)?;
                }
            }
            omega.add_mass(Cell::Annulus, annulus_mass)?;
            Ok(omega)
        }
    }
}

/// Inverse translation: a quantized probability measure on `Γ_f` back to an
/// admissible pair; vertex masses become the pair's non-atomic scalars.
pub fn mu_from_omega(
    omega: &QuantizedMeasure,
    geom: &RescalingGeometry,
) -> Result<AdmissiblePair> {
    if omega.gamma() != &geom.gamma {
        return Err(CoreError::CellMismatch(String::from(
            "measure lives on a different partition",
        )));
    }
    match &geom.gamma {
        PartitionGamma::Gauss => {
            let mut mu_c = AtomicComplexMeasure::new();
            mu_c.set_leftover(omega.mass_of(&Cell::GaussVertex))?;
            for (cell, mass) in omega.support() {
                if let Cell::GaussDir(x) = cell {
                    mu_c.add_atom(x, mass)?;
                }
            }
            let mu_e = moebius_pushforward(&geom.a_tilde, &mu_c)?;
            Ok(AdmissiblePair { mu_c, mu_e })
        }
        PartitionGamma::Pair { toward_image, toward_gauss, .. } => {
            let mut mu_c = AtomicComplexMeasure::new();
            mu_c.set_leftover(omega.mass_of(&Cell::GaussVertex))?;
            let mut h_mass = omega.mass_of(&Cell::Annulus) + omega.mass_of(&Cell::ImageVertex);
            let mut a_mass = omega.mass_of(&Cell::Annulus) + omega.mass_of(&Cell::GaussVertex);
            let mut mu_e = AtomicComplexMeasure::new();
            mu_e.set_leftover(omega.mass_of(&Cell::ImageVertex))?;
            for (cell, mass) in omega.support() {
                match cell {
                    Cell::GaussDir(x) => {
                        a_mass += &mass;
                        mu_c.add_atom(x, mass)?;
                    }
                    Cell::ImageDir(y) => {
                        h_mass += &mass;
                        mu_e.add_atom(y, mass)?;
                    }
                    _ => {}
                }
            }
            mu_c.add_atom(toward_image.clone(), h_mass)?;
            mu_e.add_atom(toward_gauss.clone(), a_mass)?;
            Ok(AdmissiblePair { mu_c, mu_e })
        }
    }
}

/// The degenerating balance `(Ã∘f)^* μ_E = d·μ_C`, checked exactly through
/// the reduction of `A∘f` (the orbit's step-0 conjugated reduction).
pub fn degenerating_balance_check(
    orbit: &GaussOrbit,
    pair: &AdmissiblePair,
) -> Result<bool> {
    let step0 = orbit.step(0)?;
    let pulled = reduced_pullback(&step0.reduction, &pair.mu_e)?;
    let scaled = pair.mu_c.scale(&Rat::from(BigInt::from(orbit.degree())));
    Ok(pulled.approx_eq_exact(&scaled))
}

/// Exact direction data of the projected equilibrium measure used by the
/// witness construction: the exceptional direction and its mass, plus the
/// finitely many other directions with positive mass.
#[derive(Clone, Debug)]
pub struct ProjectedEquilibrium {
    pub exceptional_label: ResidueValue,
    pub nu_exceptional: Rat,
    pub other_atoms: Vec<(ResidueValue, Rat)>,
}

/// A verified element of the limit set description: the witness `ω_n` on
/// `Γ_{f^n}`, the target `ω` on `Γ_G`, and both defining equalities.
#[derive(Clone, Debug)]
pub struct DeltaWitness {
    pub omega_n: QuantizedMeasure,
    pub omega: QuantizedMeasure,
    pub pullback_exact: bool,
    pub projection_exact: bool,
    pub max_residual: Rat,
}

/// Build and verify the witness measure for parameters `(s, s')` at level
/// `n`, following the seven-line mass table of the construction.
pub fn delta_witness(
    orbit: &GaussOrbit,
    eq: &ProjectedEquilibrium,
    s: &Rat,
    s_prime: &Rat,
    n: usize,
) -> Result<DeltaWitness> {
    if s.is_negative() || s > &Rat::one() {
        return Err(CoreError::BoundViolated(format!("s = {} outside [0, 1]", rat_string(s))));
    }
    let nu = &eq.nu_exceptional;
    if nu >= &Rat::one() {
        return Err(CoreError::NotCaseII);
    }
    let bound_a = s * nu;
    let bound_b = (Rat::one() - s) * (Rat::one() - nu);
    let bound = bound_a.clone().min(bound_b.clone());
    if s_prime.is_negative() || s_prime > &bound {
        return Err(CoreError::BoundViolated(format!(
            "s' = {} exceeds min{{s·ν, (1-s)(1-ν)}} = {}",
            rat_string(s_prime),
            rat_string(&bound)
        )));
    }
    let gamma = PartitionGamma::from_orbit(orbit, n)?;
    if !gamma.is_pair() {
        return Err(CoreError::NotCaseII);
    }

    let one_minus_nu = Rat::one() - nu;
    let image_vertex_mass = s_prime / &one_minus_nu;

    let mut omega_n = QuantizedMeasure::zero(gamma.clone());
    omega_n.add_mass(Cell::GaussVertex, s_prime.clone())?;
    omega_n.add_mass(Cell::ImageVertex, image_vertex_mass.clone())?;
    for (v, nu_v) in &eq.other_atoms {
        omega_n.add_mass(Cell::GaussDir(v.clone()), s * nu_v)?;
    }
    omega_n.add_mass(Cell::Annulus, s * nu - s_prime)?;
    // the direction at S_n toward the exceptional point: the chained
    // pushforward of the exceptional direction
    let toward_a = orbit.iterated_directional_data(&eq.exceptional_label, n)?.pushforward;
    omega_n.add_mass(
        Cell::ImageDir(toward_a),
        Rat::one() - s - &image_vertex_mass,
    )?;

    let mut omega = QuantizedMeasure::zero(PartitionGamma::Gauss);
    omega.add_mass(Cell::GaussVertex, s_prime.clone())?;
    for (v, nu_v) in &eq.other_atoms {
        omega.add_mass(Cell::GaussDir(v.clone()), s * nu_v)?;
    }
    omega.add_mass(
        Cell::GaussDir(eq.exceptional_label.clone()),
        s * nu + (Rat::one() - s) - s_prime,
    )?;

    // both defining equalities, exactly
    let projected = project_to_gauss(&omega_n)?;
    let projection_exact = projected == omega || projected.max_residual(&omega)?.is_zero();
    let mut dn = Rat::one();
    for _ in 0..n {
        dn *= Rat::from(BigInt::from(orbit.degree()));
    }
    let pulled = quantized_pullback(orbit, n, &omega_n)?.scale(&(Rat::one() / dn));
    let pull_res = pulled.max_residual(&omega)?;
    let proj_res = projected.max_residual(&omega)?;
    Ok(DeltaWitness {
        omega_n,
        omega,
        pullback_exact: pull_res.is_zero(),
        projection_exact,
        max_residual: pull_res.max(proj_res),
    })
}
