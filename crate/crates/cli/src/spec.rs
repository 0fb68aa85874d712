//! State-spec file: a single JSON document naming a group, an on-site action,
//! a state, and a list of tasks. Every resolution error carries the offending
//! field so `run` can exit 2 with a usable diagnostic.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Deserialize;
use spt_core::builtins;
use spt_core::interactions::{Interaction, LatticePatch, Metric};
use spt_core::{FiniteGroup, OnSiteAction, UniformMPS};

#[derive(Debug)]
pub struct SpecError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "spec error at `{}`: {}", self.field, self.message)
    }
}

fn err(field: &str, message: impl std::fmt::Display) -> SpecError {
    SpecError { field: field.into(), message: message.to_string() }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpecFile {
    pub group: GroupBlock,
    pub state: StateBlock,
    pub action: ActionBlock,
    pub tasks: Vec<TaskBlock>,
    #[serde(default)]
    pub column: Option<ColumnBlock>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupBlock {
    Cyclic { n: usize },
    Product { factors: Vec<usize> },
    Table { rows: Vec<Vec<usize>> },
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum StateBlock {
    Named {
        name: String,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        charge: Option<usize>,
        #[serde(default)]
        amplitudes: Option<Vec<[f64; 2]>>,
    },
    Explicit {
        tensors: Vec<Vec<Vec<[f64; 2]>>>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum ActionBlock {
    Named {
        name: String,
        #[serde(default)]
        charges: Option<Vec<i64>>,
    },
    Explicit {
        matrices: Vec<Vec<Vec<[f64; 2]>>>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnBlock {
    pub state: StateBlock,
    pub action: ActionBlock,
}

#[derive(Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskBlock {
    Cohomology { n: usize, m: u64 },
    H2Index,
    TranslationIndex,
    TwoDReport,
    Verify { transforms: Vec<String> },
    FNorm { interaction: String, phi: f64, #[serde(default)] metric: Option<String> },
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Override for the snap lattice 1/m; defaults to |G|.
    #[serde(default)]
    pub snap_m: Option<u64>,
}

/// Spec blocks resolved into live objects, dimension-checked.
pub struct ResolvedSpec {
    pub group: Arc<FiniteGroup>,
    pub state: UniformMPS,
    pub action: OnSiteAction,
    pub column: Option<(UniformMPS, OnSiteAction)>,
    pub tasks: Vec<TaskBlock>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

pub fn parse(text: &str) -> Result<StateSpecFile, SpecError> {
    serde_json::from_str(text).map_err(|e| err("(json)", e))
}

pub fn resolve(spec: StateSpecFile) -> Result<ResolvedSpec, SpecError> {
    let group = build_group(&spec.group)?;
    let (state, action) = build_pair(&group, &spec.state, &spec.action, "state", "action")?;
    let column = match &spec.column {
        Some(c) => Some(build_pair(&group, &c.state, &c.action, "column.state", "column.action")?),
        None => None,
    };
    Ok(ResolvedSpec {
        group,
        state,
        action,
        column,
        tasks: spec.tasks,
        seed: spec.seed,
        tolerances: spec.tolerances,
    })
}

fn build_group(block: &GroupBlock) -> Result<Arc<FiniteGroup>, SpecError> {
    match block {
        GroupBlock::Cyclic { n } => FiniteGroup::cyclic(*n).map_err(|e| err("group.n", e)),
        GroupBlock::Product { factors } => {
            if factors.is_empty() {
                return Err(err("group.factors", "needs at least one factor"));
            }
            let mut g = FiniteGroup::cyclic(factors[0]).map_err(|e| err("group.factors", e))?;
            for n in &factors[1..] {
                let h = FiniteGroup::cyclic(*n).map_err(|e| err("group.factors", e))?;
                g = FiniteGroup::direct_product(&g, &h).map_err(|e| err("group.factors", e))?;
            }
            Ok(g)
        }
        GroupBlock::Table { rows } => {
            FiniteGroup::from_table(rows.clone(), "table").map_err(|e| err("group.rows", e))
        }
    }
}

fn build_pair(
    group: &Arc<FiniteGroup>,
    state_block: &StateBlock,
    action_block: &ActionBlock,
    state_field: &str,
    action_field: &str,
) -> Result<(UniformMPS, OnSiteAction), SpecError> {
    // named states carry a bundled action usable via action name "default"
    let (state, bundled) = build_state(state_block, state_field)?;
    let action = match action_block {
        ActionBlock::Named { name, charges } => match name.as_str() {
            "default" => bundled.ok_or_else(|| {
                err(action_field, "action `default` needs a named built-in state")
            })?,
            "aklt_pi_rotations" => {
                builtins::aklt_pi_rotations().map_err(|e| err(action_field, e))?
            }
            "trivial" => OnSiteAction::trivial(group.clone(), state.physical_dim()),
            "cyclic_diag" => {
                let charges = charges
                    .as_ref()
                    .ok_or_else(|| err(action_field, "cyclic_diag needs `charges`"))?;
                builtins::cyclic_diagonal_action(group, charges).map_err(|e| err(action_field, e))?
            }
            other => return Err(err(action_field, format!("unknown action `{other}`"))),
        },
        ActionBlock::Explicit { matrices } => {
            if matrices.len() != group.order() {
                return Err(err(
                    action_field,
                    format!("{} matrices for a group of order {}", matrices.len(), group.order()),
                ));
            }
            let mats = matrices
                .iter()
                .map(|m| parse_matrix(m, action_field))
                .collect::<Result<Vec<_>, _>>()?;
            OnSiteAction::new(group.clone(), mats).map_err(|e| err(action_field, e))?
        }
    };
    // the declared group must be the action's group, element for element
    if action.group().order() != group.order()
        || !group
            .elements()
            .all(|g| group.elements().all(|h| group.mul(g, h) == action.group().mul(g, h)))
    {
        return Err(err(
            "group",
            format!("declared group does not match the `{action_field}` multiplication table"),
        ));
    }
    if action.dim() != state.physical_dim() {
        return Err(err(
            action_field,
            format!(
                "action dimension {} does not match physical dimension {}",
                action.dim(),
                state.physical_dim()
            ),
        ));
    }
    Ok((state, action))
}

fn build_state(
    block: &StateBlock,
    field: &str,
) -> Result<(UniformMPS, Option<OnSiteAction>), SpecError> {
    match block {
        StateBlock::Named { name, n, charge, amplitudes } => match name.as_str() {
            "aklt" => {
                let (s, a) = builtins::aklt().map_err(|e| err(field, e))?;
                Ok((s, Some(a)))
            }
            "product_spin1" => {
                let (s, a) = builtins::product_spin1().map_err(|e| err(field, e))?;
                Ok((s, Some(a)))
            }
            "cluster_z2z2" => {
                let (s, a) = builtins::cluster_z2z2().map_err(|e| err(field, e))?;
                Ok((s, Some(a)))
            }
            "charged_product" => {
                let n = n.ok_or_else(|| err(field, "charged_product needs `n`"))?;
                let charge = charge.ok_or_else(|| err(field, "charged_product needs `charge`"))?;
                let (s, a) = builtins::charged_product(n, charge).map_err(|e| err(field, e))?;
                Ok((s, Some(a)))
            }
            "product" => {
                let amps = amplitudes
                    .as_ref()
                    .ok_or_else(|| err(field, "product needs `amplitudes`"))?;
                let amps: Vec<C64> = amps.iter().map(|[re, im]| C64::new(*re, *im)).collect();
                let s = UniformMPS::product(&amps, "product").map_err(|e| err(field, e))?;
                Ok((s, None))
            }
            other => Err(err(field, format!("unknown state `{other}`"))),
        },
        StateBlock::Explicit { tensors } => {
            let mats = tensors
                .iter()
                .map(|m| parse_matrix(m, field))
                .collect::<Result<Vec<_>, _>>()?;
            let s = UniformMPS::new(mats, "explicit").map_err(|e| err(field, e))?;
            Ok((s, None))
        }
    }
}

fn parse_matrix(rows: &[Vec<[f64; 2]>], field: &str) -> Result<Array2<C64>, SpecError> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, |r| r.len());
    if nr == 0 || nc == 0 || rows.iter().any(|r| r.len() != nc) {
        return Err(err(field, "matrix rows must be nonempty and of equal length"));
    }
    let mut m = Array2::<C64>::zeros((nr, nc));
    for (i, row) in rows.iter().enumerate() {
        for (j, [re, im]) in row.iter().enumerate() {
            m[(i, j)] = C64::new(*re, *im);
        }
    }
    Ok(m)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionFile {
    pub patch: PatchBlock,
    pub terms: Vec<TermBlock>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatchBlock {
    Line { lo: i64, hi: i64, site_dim: usize },
    Rect { x: [i64; 2], y: [i64; 2], site_dim: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermBlock {
    pub sites: Vec<[i64; 2]>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

pub fn load_interaction(path: &str) -> Result<Interaction, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err("f_norm.interaction", format!("cannot read `{path}`: {e}")))?;
    let file: InteractionFile = serde_json::from_str(&text).map_err(|e| err(path, e))?;
    let patch = match file.patch {
        PatchBlock::Line { lo, hi, site_dim } => {
            LatticePatch::line(lo, hi, site_dim).map_err(|e| err("patch", e))?
        }
        PatchBlock::Rect { x, y, site_dim } => {
            LatticePatch::rect((x[0], x[1]), (y[0], y[1]), site_dim).map_err(|e| err("patch", e))?
        }
    };
    let mut interaction = Interaction::new(patch);
    for (i, term) in file.terms.iter().enumerate() {
        let sites = term.sites.iter().map(|[x, y]| [*x, *y]).collect();
        let matrix = parse_matrix(&term.matrix, &format!("terms[{i}].matrix"))?;
        interaction
            .add_term(sites, matrix)
            .map_err(|e| err(&format!("terms[{i}]"), e))?;
    }
    Ok(interaction)
}

pub fn parse_metric(name: Option<&str>) -> Result<Metric, SpecError> {
    match name {
        None | Some("euclidean") => Ok(Metric::Euclidean),
        Some("l1") => Ok(Metric::L1),
        Some(other) => Err(err("f_norm.metric", format!("unknown metric `{other}`"))),
    }
}
