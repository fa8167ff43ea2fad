//! Reward and individual-utility models, SPAO (single-peaked-at-one)
//! validation, and the minimum-requirement auxiliary-utility wrapper.
//!
//! Individual utility is the equal-share rule: a coalition's reward divided
//! by its size, minus the agent's personal cost for that task. SPAO is the
//! "social inhibition" condition — individual utility non-increasing in the
//! number of co-workers — under which the engine's convergence guarantees
//! hold.

use crate::model::{AgentId, AgentSpec, Scenario, TaskId, TaskSpec, UtilityKind};

/// How a task's reward varies with the number of participants `p >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum RewardModel {
    /// Reward peaks when exactly `n_d` agents participate:
    /// `r_max * (p / n_d) * exp(1 - p / n_d)`.
    Peaked { r_max: f64, n_d: u32 },
    /// Reward grows with participants at a diminishing marginal gain:
    /// `r_min * log_eps(p + eps - 1)`, with `eps > 1`.
    Submodular { r_min: f64, epsilon: f64 },
    /// Arbitrary per-count rewards, `values[p - 1]` for `p = 1..=n_a`.
    /// Exists for brute-force cross-checks and adversarial tests.
    Tabular { values: Vec<f64> },
    /// Identically zero reward.
    Void,
}

impl RewardModel {
    pub(crate) fn validate(&self, n_a: usize) -> Result<(), String> {
        match self {
            RewardModel::Peaked { r_max, n_d } => {
                if !(*r_max > 0.0) || !r_max.is_finite() {
                    return Err(format!("r_max must be positive, got {r_max}"));
                }
                if *n_d < 1 {
                    return Err("n_d must be >= 1".into());
                }
            }
            RewardModel::Submodular { r_min, epsilon } => {
                if !(*r_min > 0.0) || !r_min.is_finite() {
                    return Err(format!("r_min must be positive, got {r_min}"));
                }
                if !(*epsilon > 1.0) || !epsilon.is_finite() {
                    return Err(format!("epsilon must be > 1, got {epsilon}"));
                }
            }
            RewardModel::Tabular { values } => {
                if values.len() < n_a {
                    return Err(format!(
                        "tabular reward supplies {} values but {} participants are possible",
                        values.len(),
                        n_a
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err("tabular reward contains a non-finite value".into());
                }
            }
            RewardModel::Void => {}
        }
        Ok(())
    }
}

/// Task reward for `p` participants. Panics if `p == 0`: a coalition being
/// rewarded always contains at least the deciding agent.
pub fn reward(model: &RewardModel, p: usize) -> f64 {
    assert!(p >= 1, "reward is defined for participant counts >= 1");
    match model {
        RewardModel::Peaked { r_max, n_d } => {
            let ratio = p as f64 / f64::from(*n_d);
            r_max * ratio * (1.0 - ratio).exp()
        }
        RewardModel::Submodular { r_min, epsilon } => {
            r_min * (p as f64 + epsilon - 1.0).ln() / epsilon.ln()
        }
        RewardModel::Tabular { values } => values[p - 1],
        RewardModel::Void => 0.0,
    }
}

/// Base individual utility of `agent` doing `task` with `p` participants:
/// the equal share of the reward minus the agent's cost.
///
/// A non-positive value means the agent would rather idle; the engine
/// realizes that preference because the void option (utility 0) always
/// participates in its argmax.
pub fn individual_utility(agent: &AgentSpec, task: &TaskSpec, p: usize) -> f64 {
    reward(&task.reward, p) / p as f64 - agent.cost_to(task)
}

/// The constant dummy utility used on the under-requirement plateau of the
/// auxiliary utility.
///
/// It must exceed every utility an agent can obtain anywhere once
/// requirements are met (so under-filled tasks are always preferred — the
/// strict-preference condition behind requirement satisfaction) and also
/// dominate the base utility on the plateau itself (so the auxiliary utility
/// never falls below the base one, which the suboptimality bounds rely on).
/// Both hold for `beta + max(0, max over tasks k and p <= R_k + 1 of
/// u_i(t_k, p))`.
pub fn dummy_utility(agent: &AgentSpec, tasks: &[TaskSpec], n_agents: usize, beta: f64) -> f64 {
    let mut best = 0.0f64; // the void task's utility
    for task in tasks {
        let upper = (task.min_requirement + 1).min(n_agents);
        for p in 1..=upper {
            best = best.max(individual_utility(agent, task, p));
        }
    }
    beta + best
}

/// Auxiliary individual utility: the dummy plateau while the coalition is at
/// or below the task's minimum requirement, the base utility beyond it.
/// Tasks with no requirement reduce to the base utility for every `p`.
pub fn auxiliary_utility(
    agent: &AgentSpec,
    task: &TaskSpec,
    p: usize,
    tasks: &[TaskSpec],
    n_agents: usize,
    beta: f64,
) -> f64 {
    assert!(p >= 1);
    if p <= task.min_requirement {
        dummy_utility(agent, tasks, n_agents, beta)
    } else {
        individual_utility(agent, task, p)
    }
}

/// Outcome of an SPAO check: pass, or the first violation found.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaoReport {
    pub pass: bool,
    /// `(task, p)` such that the utility at `p` exceeds the one at `p - 1`.
    pub first_violation: Option<(TaskId, usize)>,
}

impl SpaoReport {
    fn pass() -> Self {
        SpaoReport {
            pass: true,
            first_violation: None,
        }
    }

    fn violation(task: TaskId, p: usize) -> Self {
        SpaoReport {
            pass: false,
            first_violation: Some((task, p)),
        }
    }
}

/// Checks that an agent's base utility is non-increasing in the participant
/// count for every real task, i.e. the agent is socially inhibited.
pub fn check_spao(agent: &AgentSpec, tasks: &[TaskSpec], n_agents: usize) -> SpaoReport {
    check_spao_with(tasks, n_agents, |task, p| individual_utility(agent, task, p))
}

fn check_spao_with(
    tasks: &[TaskSpec],
    n_agents: usize,
    eval: impl Fn(&TaskSpec, usize) -> f64,
) -> SpaoReport {
    for task in tasks {
        if n_agents == 0 {
            continue;
        }
        let mut prev = eval(task, 1);
        for p in 2..=n_agents {
            let cur = eval(task, p);
            if cur > prev {
                return SpaoReport::violation(task.id, p);
            }
            prev = cur;
        }
    }
    SpaoReport::pass()
}

/// SPAO check over a whole scenario under its effective utility.
///
/// Because the cost term does not depend on the participant count, base
/// SPAO holds for every agent exactly when each task's reward share
/// `r(p)/p` is non-increasing, so one pass per task suffices. For the
/// auxiliary utility the plateau is constant and its boundary dominates the
/// base utility by construction whenever `beta > 0`, leaving only the
/// post-requirement region to scan.
pub fn check_spao_scenario(scenario: &Scenario) -> SpaoReport {
    let n_a = scenario.n_agents();
    for task in &scenario.tasks {
        let start = match scenario.utility {
            UtilityKind::Base => 1,
            UtilityKind::MinRequirement { .. } => task.min_requirement + 1,
        };
        if start >= n_a {
            continue;
        }
        let mut prev = reward(&task.reward, start) / start as f64;
        for p in start + 1..=n_a {
            let cur = reward(&task.reward, p) / p as f64;
            if cur > prev {
                return SpaoReport::violation(task.id, p);
            }
            prev = cur;
        }
    }
    SpaoReport::pass()
}

/// Outcome of the requirement-preference check.
#[derive(Clone, Debug, PartialEq)]
pub struct Condition1Report {
    pub pass: bool,
    /// A pair `(t_j, t_k)` with `u~(t_j, R_j) <= u~(t_k, R_k + 1)`, when the
    /// strict preference fails.
    pub violating_pair: Option<(TaskId, TaskId)>,
    /// The auxiliary utility must itself be SPAO for convergence to hold.
    pub spao: SpaoReport,
}

/// Checks the strict preference that makes Nash-stable partitions satisfy
/// minimum requirements: for every pair of tasks, doing `t_j` with exactly
/// `R_j` participants is strictly preferred to doing `t_k` with `R_k + 1`.
/// Also verifies that the auxiliary utility is SPAO for this agent.
///
/// Pairs where `R_j = 0` are vacuous (there is no under-filled state) and
/// are skipped; comparisons at participant counts beyond `n_agents` are
/// unrealizable and skipped as well.
pub fn check_condition_1(
    agent: &AgentSpec,
    tasks: &[TaskSpec],
    n_agents: usize,
    beta: f64,
) -> Condition1Report {
    let aux = |task: &TaskSpec, p: usize| auxiliary_utility(agent, task, p, tasks, n_agents, beta);

    let spao = check_spao_with(tasks, n_agents, aux);

    let mut violating_pair = None;
    'outer: for tj in tasks {
        if tj.min_requirement == 0 || tj.min_requirement > n_agents {
            continue;
        }
        let lhs = aux(tj, tj.min_requirement);
        // The right-hand side ranges over all tasks including the void one,
        // whose utility at any count is 0.
        if lhs <= 0.0 {
            violating_pair = Some((tj.id, TaskId::VOID));
            break;
        }
        for tk in tasks {
            let p = tk.min_requirement + 1;
            if p > n_agents {
                continue;
            }
            if lhs <= aux(tk, p) {
                violating_pair = Some((tj.id, tk.id));
                break 'outer;
            }
        }
    }

    Condition1Report {
        pass: violating_pair.is_none() && spao.pass,
        violating_pair,
        spao,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Point;

    fn agent(cost: f64) -> AgentSpec {
        AgentSpec {
            id: AgentId(0),
            position: Point::new(0.0, 0.0),
            cost_coefficient: cost,
        }
    }

    fn task(id: usize, reward: RewardModel, min_requirement: usize) -> TaskSpec {
        TaskSpec {
            id: TaskId(id),
            position: Point::new(1.0, 0.0),
            reward,
            min_requirement,
        }
    }

    #[test]
    fn peaked_reward_attains_maximum_at_desired_count() {
        let m = RewardModel::Peaked {
            r_max: 60.0,
            n_d: 15,
        };
        assert_eq!(reward(&m, 15), 60.0);
        for p in 1..=40 {
            assert!(reward(&m, p) <= 60.0);
        }
    }

    #[test]
    fn submodular_reward_values() {
        let m = RewardModel::Submodular {
            r_min: 10.0,
            epsilon: 2.0,
        };
        assert_eq!(reward(&m, 1), 10.0);
        assert!((reward(&m, 3) - 20.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic]
    fn reward_rejects_zero_participants() {
        let _ = reward(&RewardModel::Void, 0);
    }

    #[test]
    fn individual_utility_subtracts_cost_share() {
        // distance 1, kappa 5 => cost 5; share at p=3 is 20/3.
        let a = agent(5.0);
        let t = task(
            1,
            RewardModel::Submodular {
                r_min: 10.0,
                epsilon: 2.0,
            },
            0,
        );
        let u = individual_utility(&a, &t, 3);
        assert!((u - (20.0 / 3.0 - 5.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_individual_utility_is_strictly_decreasing() {
        let a = agent(0.0);
        let t = task(
            1,
            RewardModel::Peaked {
                r_max: 60.0,
                n_d: 15,
            },
            0,
        );
        let mut prev = individual_utility(&a, &t, 1);
        for p in 2..=40 {
            let cur = individual_utility(&a, &t, p);
            assert!(cur < prev, "expected strict decrease at p={p}");
            prev = cur;
        }
    }

    #[test]
    fn spao_passes_for_both_reward_families() {
        let a = agent(0.3);
        let tasks = vec![
            task(
                1,
                RewardModel::Peaked {
                    r_max: 60.0,
                    n_d: 15,
                },
                0,
            ),
            task(
                2,
                RewardModel::Submodular {
                    r_min: 10.0,
                    epsilon: 2.0,
                },
                0,
            ),
        ];
        assert!(check_spao(&a, &tasks, 40).pass);
    }

    #[test]
    fn spao_detects_increasing_tabular_utility() {
        let a = agent(0.0);
        let tasks = vec![task(1, RewardModel::Tabular { values: vec![1.0, 4.0] }, 0)];
        // shares: 1/1 = 1 then 4/2 = 2, increasing.
        let report = check_spao(&a, &tasks, 2);
        assert!(!report.pass);
        assert_eq!(report.first_violation, Some((TaskId(1), 2)));
    }

    #[test]
    fn auxiliary_utility_plateau_and_boundary() {
        let a = agent(0.0);
        let tasks = vec![
            task(
                1,
                RewardModel::Submodular {
                    r_min: 10.0,
                    epsilon: 2.0,
                },
                3,
            ),
            task(
                2,
                RewardModel::Submodular {
                    r_min: 8.0,
                    epsilon: 2.0,
                },
                0,
            ),
        ];
        let beta = 1.0;
        let n_a = 10;
        let u0 = dummy_utility(&a, &tasks, n_a, beta);
        // Constant on the plateau.
        for p in 1..=3 {
            assert_eq!(auxiliary_utility(&a, &tasks[0], p, &tasks, n_a, beta), u0);
        }
        // Strictly above the base utility just past the requirement.
        let past = auxiliary_utility(&a, &tasks[0], 4, &tasks, n_a, beta);
        assert_eq!(past, individual_utility(&a, &tasks[0], 4));
        assert!(u0 > past);
    }

    #[test]
    fn auxiliary_reduces_to_base_without_requirements() {
        let a = agent(0.7);
        let tasks = vec![task(
            1,
            RewardModel::Peaked {
                r_max: 60.0,
                n_d: 15,
            },
            0,
        )];
        for p in 1..=12 {
            assert_eq!(
                auxiliary_utility(&a, &tasks[0], p, &tasks, 12, 1.0),
                individual_utility(&a, &tasks[0], p)
            );
        }
    }

    #[test]
    fn auxiliary_dominates_base_pointwise() {
        // High base utility on the plateau of a required task is the case
        // that needs the dummy value to take plateau values into account.
        let a = agent(0.0);
        let tasks = vec![
            task(
                1,
                RewardModel::Submodular {
                    r_min: 100.0,
                    epsilon: 2.0,
                },
                2,
            ),
            task(
                2,
                RewardModel::Submodular {
                    r_min: 5.0,
                    epsilon: 2.0,
                },
                1,
            ),
        ];
        let n_a = 8;
        for t in &tasks {
            for p in 1..=n_a {
                let base = individual_utility(&a, t, p);
                let aux = auxiliary_utility(&a, t, p, &tasks, n_a, 1.0);
                assert!(
                    aux >= base,
                    "auxiliary utility fell below base at task {:?} p={}",
                    t.id,
                    p
                );
            }
        }
    }

    #[test]
    fn condition_1_passes_with_positive_offset_and_fails_at_zero() {
        let a = agent(0.1);
        let tasks = vec![
            task(
                1,
                RewardModel::Submodular {
                    r_min: 10.0,
                    epsilon: 2.0,
                },
                3,
            ),
            task(
                2,
                RewardModel::Submodular {
                    r_min: 12.0,
                    epsilon: 2.0,
                },
                0,
            ),
        ];
        assert!(check_condition_1(&a, &tasks, 10, 1.0).pass);
        // With beta = 0 the strict preference collapses at the pair
        // attaining the maximum.
        let zero = check_condition_1(&a, &tasks, 10, 0.0);
        assert!(!zero.pass);
        assert!(zero.violating_pair.is_some());
    }

    #[test]
    fn condition_1_vacuous_without_requirements() {
        let a = agent(0.0);
        let tasks = vec![task(
            1,
            RewardModel::Submodular {
                r_min: 10.0,
                epsilon: 2.0,
            },
            0,
        )];
        assert!(check_condition_1(&a, &tasks, 5, 1.0).pass);
    }

    #[test]
    fn scenario_spao_check_matches_per_agent_check() {
        use crate::model::{Scenario, UtilityKind};
        let tasks = vec![
            task(
                1,
                RewardModel::Peaked {
                    r_max: 55.0,
                    n_d: 4,
                },
                0,
            ),
            task(
                2,
                RewardModel::Submodular {
                    r_min: 9.0,
                    epsilon: 3.0,
                },
                0,
            ),
        ];
        let s = Scenario {
            agents: (0..6)
                .map(|i| AgentSpec {
                    id: AgentId(i),
                    position: Point::new(i as f64, 0.0),
                    cost_coefficient: 1.0,
                })
                .collect(),
            tasks: tasks.clone(),
            utility: UtilityKind::Base,
            rng_seed: 0,
        };
        assert!(check_spao_scenario(&s).pass);
        for a in &s.agents {
            assert!(check_spao(a, &tasks, 6).pass);
        }
    }
}
