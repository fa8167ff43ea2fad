//! Domain types shared by every other module: agents, tasks, partitions,
//! scenarios, and the global-utility objective.
//!
//! Coalitions are indexed by task: index 0 is always the void task (the
//! option of doing nothing, worth zero utility), real tasks are `1..=n_t`.
//! A [`Partition`] stores only the agent-to-task assignment; coalition sizes
//! are derived and cached so disjointness cannot be violated by construction.

use serde::Serialize;
use thiserror::Error;

use crate::utility::{self, RewardModel};

/// Identifier of an agent: a dense index in `[0, n_a)`, stable for a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

impl std::fmt::Display for AgentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of a task. Index 0 denotes the void task; real tasks are
/// `1..=n_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct TaskId(pub usize);

impl TaskId {
    /// The void task: performing no task, with utility identically zero.
    pub const VOID: TaskId = TaskId(0);

    pub fn is_void(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for TaskId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A 2D position in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance. Uses `sqrt(dx^2 + dy^2)` rather than `hypot` so
    /// the result is bit-reproducible across libm implementations.
    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// An agent: position plus a non-negative cost-per-meter coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentSpec {
    pub id: AgentId,
    pub position: Point,
    /// Cost per meter of distance to a task. The cost of the void task is 0.
    pub cost_coefficient: f64,
}

impl AgentSpec {
    /// Travel cost to a real task: `kappa * distance(agent, task)`.
    pub fn cost_to(&self, task: &TaskSpec) -> f64 {
        self.cost_coefficient * self.position.distance(task.position)
    }
}

/// A real task: position, reward model, and an optional minimum number of
/// agents required for completion (0 means unconstrained).
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    pub id: TaskId,
    pub position: Point,
    pub reward: RewardModel,
    pub min_requirement: usize,
}

/// Which individual-utility model a scenario uses.
///
/// `Base` is the plain equal-share utility `r(t_j, p)/p - c_i(t_j)`.
/// `MinRequirement` wraps it in the auxiliary utility that plateaus at a
/// dummy value for participant counts at or below each task's minimum
/// requirement, which steers Nash-stable outcomes into satisfying those
/// requirements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UtilityKind {
    Base,
    MinRequirement { beta: f64 },
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("agent {index} has id {found}, expected dense index {index}")]
    AgentIdMismatch { index: usize, found: usize },
    #[error("task {index} has id {found}, expected dense index {expected}")]
    TaskIdMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("agent {0} has invalid cost coefficient {1}")]
    BadCostCoefficient(usize, f64),
    #[error("task {0} has invalid reward parameters: {1}")]
    BadRewardModel(usize, String),
    #[error("task {task} requires {required} agents but only {available} exist")]
    RequirementTooLarge {
        task: usize,
        required: usize,
        available: usize,
    },
    #[error("auxiliary utility offset beta must be > 0, got {0}")]
    BadBeta(f64),
    #[error("non-finite position on {0}")]
    BadPosition(String),
}

/// A full problem instance: agents, real tasks, the utility model, and the
/// seed it was generated from.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub agents: Vec<AgentSpec>,
    /// Real tasks only; `tasks[k].id == TaskId(k + 1)`. The void task is
    /// implicit.
    pub tasks: Vec<TaskSpec>,
    pub utility: UtilityKind,
    pub rng_seed: u64,
}

impl Scenario {
    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    /// Number of real tasks (excluding the void task).
    pub fn n_real_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn agent(&self, a: AgentId) -> &AgentSpec {
        &self.agents[a.0]
    }

    /// The spec of a real task, or `None` for the void task.
    pub fn task(&self, t: TaskId) -> Option<&TaskSpec> {
        if t.is_void() {
            None
        } else {
            self.tasks.get(t.0 - 1)
        }
    }

    /// Sum of all minimum requirements.
    pub fn total_required(&self) -> usize {
        self.tasks.iter().map(|t| t.min_requirement).sum()
    }

    /// The utility the agents actually decide on: the base individual
    /// utility, or the auxiliary one when minimum requirements are active.
    pub fn utility_of(&self, a: AgentId, t: TaskId, p: usize) -> f64 {
        match self.utility {
            UtilityKind::Base => self.base_utility_of(a, t, p),
            UtilityKind::MinRequirement { beta } => match self.task(t) {
                None => 0.0,
                Some(task) => utility::auxiliary_utility(
                    self.agent(a),
                    task,
                    p,
                    &self.tasks,
                    self.n_agents(),
                    beta,
                ),
            },
        }
    }

    /// The base individual utility (the objective's terms), regardless of
    /// the scenario's utility kind.
    pub fn base_utility_of(&self, a: AgentId, t: TaskId, p: usize) -> f64 {
        match self.task(t) {
            None => 0.0,
            Some(task) => utility::individual_utility(self.agent(a), task, p),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let n_a = self.n_agents();
        for (i, a) in self.agents.iter().enumerate() {
            if a.id.0 != i {
                return Err(ScenarioError::AgentIdMismatch {
                    index: i,
                    found: a.id.0,
                });
            }
            if !a.cost_coefficient.is_finite() || a.cost_coefficient < 0.0 {
                return Err(ScenarioError::BadCostCoefficient(i, a.cost_coefficient));
            }
            if !a.position.x.is_finite() || !a.position.y.is_finite() {
                return Err(ScenarioError::BadPosition(format!("agent {i}")));
            }
        }
        for (k, t) in self.tasks.iter().enumerate() {
            if t.id.0 != k + 1 {
                return Err(ScenarioError::TaskIdMismatch {
                    index: k,
                    found: t.id.0,
                    expected: k + 1,
                });
            }
            if !t.position.x.is_finite() || !t.position.y.is_finite() {
                return Err(ScenarioError::BadPosition(format!("task {}", k + 1)));
            }
            if let Err(msg) = t.reward.validate(n_a) {
                return Err(ScenarioError::BadRewardModel(k + 1, msg));
            }
            if t.min_requirement > n_a {
                return Err(ScenarioError::RequirementTooLarge {
                    task: k + 1,
                    required: t.min_requirement,
                    available: n_a,
                });
            }
        }
        if let UtilityKind::MinRequirement { beta } = self.utility {
            if !(beta > 0.0) || !beta.is_finite() {
                return Err(ScenarioError::BadBeta(beta));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("unknown agent id {0}")]
    UnknownAgent(usize),
    #[error("unknown task id {0}")]
    UnknownTask(usize),
    #[error("assignment length {0} does not match agent count {1}")]
    LengthMismatch(usize, usize),
}

/// A disjoint, exhaustive assignment of every agent to exactly one coalition
/// `S_0..S_{n_t}`, where `S_0` is the void coalition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    assignment: Vec<TaskId>,
    #[serde(skip)]
    sizes: Vec<usize>,
}

impl Partition {
    /// The initial partition: every agent in the void coalition, all real
    /// coalitions empty.
    pub fn singleton_void(n_agents: usize, n_real_tasks: usize) -> Partition {
        Partition {
            assignment: vec![TaskId::VOID; n_agents],
            sizes: {
                let mut s = vec![0; n_real_tasks + 1];
                s[0] = n_agents;
                s
            },
        }
    }

    /// Builds a partition from an explicit assignment, validating ids.
    pub fn from_assignment(
        assignment: Vec<TaskId>,
        n_real_tasks: usize,
    ) -> Result<Partition, PartitionError> {
        let mut sizes = vec![0usize; n_real_tasks + 1];
        for t in &assignment {
            if t.0 > n_real_tasks {
                return Err(PartitionError::UnknownTask(t.0));
            }
            sizes[t.0] += 1;
        }
        Ok(Partition { assignment, sizes })
    }

    pub fn n_agents(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_real_tasks(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn task_of(&self, a: AgentId) -> TaskId {
        self.assignment[a.0]
    }

    pub fn coalition_size(&self, t: TaskId) -> usize {
        self.sizes[t.0]
    }

    /// Size of `S_t ∪ {a}`: the coalition size the agent would experience
    /// after joining `t` (unchanged if the agent is already a member).
    pub fn candidate_size(&self, a: AgentId, t: TaskId) -> usize {
        self.sizes[t.0] + usize::from(self.assignment[a.0] != t)
    }

    pub fn members(&self, t: TaskId) -> Vec<AgentId> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, x)| **x == t)
            .map(|(i, _)| AgentId(i))
            .collect()
    }

    pub fn assignment(&self) -> &[TaskId] {
        &self.assignment
    }

    /// Returns a copy with agent `a` reassigned to `to`. Moving an agent to
    /// its current coalition yields an identical partition.
    pub fn move_agent(&self, a: AgentId, to: TaskId) -> Result<Partition, PartitionError> {
        if a.0 >= self.assignment.len() {
            return Err(PartitionError::UnknownAgent(a.0));
        }
        if to.0 >= self.sizes.len() {
            return Err(PartitionError::UnknownTask(to.0));
        }
        let mut next = self.clone();
        next.move_agent_in_place(a, to);
        debug_assert!(next.check_consistent());
        Ok(next)
    }

    /// In-place move with ids already validated. Kept crate-private for the
    /// engine's hot path.
    pub(crate) fn move_agent_in_place(&mut self, a: AgentId, to: TaskId) {
        let from = self.assignment[a.0];
        if from == to {
            return;
        }
        self.sizes[from.0] -= 1;
        self.sizes[to.0] += 1;
        self.assignment[a.0] = to;
    }

    /// Full invariant recheck: cached sizes match a recount and sum to n_a.
    pub(crate) fn check_consistent(&self) -> bool {
        let mut recount = vec![0usize; self.sizes.len()];
        for t in &self.assignment {
            if t.0 >= recount.len() {
                return false;
            }
            recount[t.0] += 1;
        }
        recount == self.sizes
    }
}

/// Global utility of a partition: the sum over agents of their base
/// individual utilities. Void-task assignments contribute zero. This is the
/// objective value, so it always uses base utilities even when the scenario
/// decides on auxiliary ones.
pub fn global_utility(partition: &Partition, scenario: &Scenario) -> f64 {
    sum_utilities(partition, scenario, |a, t, p| scenario.base_utility_of(a, t, p))
}

/// Global utility under the scenario's effective (decision) utility. Equal
/// to [`global_utility`] for base scenarios.
pub fn global_utility_effective(partition: &Partition, scenario: &Scenario) -> f64 {
    sum_utilities(partition, scenario, |a, t, p| scenario.utility_of(a, t, p))
}

fn sum_utilities(
    partition: &Partition,
    scenario: &Scenario,
    eval: impl Fn(AgentId, TaskId, usize) -> f64,
) -> f64 {
    debug_assert_eq!(partition.n_agents(), scenario.n_agents());
    let mut total = 0.0;
    for i in 0..partition.n_agents() {
        let a = AgentId(i);
        let t = partition.task_of(a);
        if !t.is_void() {
            total += eval(a, t, partition.coalition_size(t));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::RewardModel;

    fn dummy_scenario(n_a: usize, tasks: Vec<TaskSpec>) -> Scenario {
        Scenario {
            agents: (0..n_a)
                .map(|i| AgentSpec {
                    id: AgentId(i),
                    position: Point::new(0.0, 0.0),
                    cost_coefficient: 0.0,
                })
                .collect(),
            tasks,
            utility: UtilityKind::Base,
            rng_seed: 0,
        }
    }

    fn submodular_task(id: usize, r_min: f64) -> TaskSpec {
        TaskSpec {
            id: TaskId(id),
            position: Point::new(0.0, 0.0),
            reward: RewardModel::Submodular {
                r_min,
                epsilon: 2.0,
            },
            min_requirement: 0,
        }
    }

    #[test]
    fn singleton_void_holds_everyone() {
        let p = Partition::singleton_void(3, 2);
        assert_eq!(p.coalition_size(TaskId::VOID), 3);
        assert_eq!(p.coalition_size(TaskId(1)), 0);
        assert_eq!(p.coalition_size(TaskId(2)), 0);
        assert!(p.check_consistent());
    }

    #[test]
    fn singleton_void_degenerate_cases() {
        let empty = Partition::singleton_void(0, 5);
        assert_eq!(empty.n_agents(), 0);
        assert!(empty.check_consistent());

        let only_void = Partition::singleton_void(1, 0);
        assert_eq!(only_void.task_of(AgentId(0)), TaskId::VOID);
    }

    #[test]
    fn move_updates_cardinalities() {
        let p = Partition::singleton_void(3, 2);
        let q = p.move_agent(AgentId(0), TaskId(2)).unwrap();
        assert_eq!(q.coalition_size(TaskId::VOID), 2);
        assert_eq!(q.coalition_size(TaskId(2)), 1);
        assert_eq!(q.task_of(AgentId(0)), TaskId(2));
        // Source partition untouched.
        assert_eq!(p.coalition_size(TaskId::VOID), 3);
    }

    #[test]
    fn move_to_current_coalition_is_identity() {
        let p = Partition::singleton_void(3, 2)
            .move_agent(AgentId(1), TaskId(1))
            .unwrap();
        let q = p.move_agent(AgentId(1), TaskId(1)).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn move_rejects_unknown_ids() {
        let p = Partition::singleton_void(2, 1);
        assert_eq!(
            p.move_agent(AgentId(2), TaskId(1)),
            Err(PartitionError::UnknownAgent(2))
        );
        assert_eq!(
            p.move_agent(AgentId(0), TaskId(9)),
            Err(PartitionError::UnknownTask(9))
        );
    }

    #[test]
    fn global_utility_of_all_void_is_zero() {
        let s = dummy_scenario(4, vec![submodular_task(1, 10.0)]);
        let p = Partition::singleton_void(4, 1);
        assert_eq!(global_utility(&p, &s), 0.0);
    }

    #[test]
    fn global_utility_single_agent_submodular() {
        // One agent, zero cost, r_min = 10: the lone agent earns the full
        // single-participant reward.
        let s = dummy_scenario(1, vec![submodular_task(1, 10.0)]);
        let p = Partition::singleton_void(1, 1)
            .move_agent(AgentId(0), TaskId(1))
            .unwrap();
        assert_eq!(global_utility(&p, &s), 10.0);
    }

    #[test]
    fn candidate_size_counts_joining_agent_once() {
        let p = Partition::singleton_void(3, 2)
            .move_agent(AgentId(0), TaskId(1))
            .unwrap();
        assert_eq!(p.candidate_size(AgentId(0), TaskId(1)), 1);
        assert_eq!(p.candidate_size(AgentId(1), TaskId(1)), 2);
        assert_eq!(p.candidate_size(AgentId(1), TaskId(2)), 1);
    }

    #[test]
    fn members_lists_exactly_the_coalition() {
        let p = Partition::singleton_void(4, 2)
            .move_agent(AgentId(1), TaskId(2))
            .unwrap()
            .move_agent(AgentId(3), TaskId(2))
            .unwrap();
        assert_eq!(p.members(TaskId(2)), vec![AgentId(1), AgentId(3)]);
        assert_eq!(p.members(TaskId(1)), vec![]);
    }
}
