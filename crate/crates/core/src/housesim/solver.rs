//! Breadth-first search over world states.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{check_goal, class_of, HouseState, HouseTask, Location, TaskFamily, WorldSpec, LAMP};

/// Receptacles worth visiting for a task: where objects of the class start,
/// receptacles of the target class, and the family's appliance.
fn relevant_receptacles(world: &WorldSpec, start: &HouseState, task: &HouseTask) -> BTreeSet<String> {
    let appliance = task.family.appliance();
    let mut keep = BTreeSet::new();
    for (o, loc) in &start.objects {
        if let Location::Receptacle(r) = loc {
            let lamp = class_of(o) == LAMP && task.family == TaskFamily::LookAtObjInLight;
            if class_of(o) == task.object_class || lamp {
                keep.insert(r.clone());
            }
        }
    }
    for r in &world.receptacles {
        let class = class_of(&r.id);
        if class == task.target_receptacle || Some(class) == appliance {
            keep.insert(r.id.clone());
        }
    }
    keep
}

fn is_relevant(action: &str, task: &HouseTask, keep: &BTreeSet<String>) -> bool {
    let first = action.split(' ').next().unwrap_or("");
    match first {
        "look" | "inventory" | "examine" | "close" => false,
        "go" => keep.contains(action.trim_start_matches("go to ")),
        "take" => action
            .strip_prefix("take ")
            .and_then(|r| r.split_once(" from "))
            .is_some_and(|(o, _)| class_of(o) == task.object_class),
        "use" => task.family == TaskFamily::LookAtObjInLight,
        "clean" => task.family == TaskFamily::PickCleanThenPlaceInRecep,
        "heat" => task.family == TaskFamily::PickHeatThenPlaceInRecep,
        "cool" => task.family == TaskFamily::PickCoolThenPlaceInRecep,
        _ => true,
    }
}

/// Shortest action sequence from `start` reaching the goal, searching at most
/// `max_depth` actions. Only task-relevant actions are expanded.
pub fn solve(
    world: &WorldSpec,
    task: &HouseTask,
    start: &HouseState,
    max_depth: usize,
) -> Option<Vec<String>> {
    if check_goal(start, task) {
        return Some(Vec::new());
    }
    let keep = relevant_receptacles(world, start, task);
    let mut parents: HashMap<HouseState, Option<(HouseState, String)>> = HashMap::new();
    parents.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start.clone(), 0usize)]);
    while let Some((state, depth)) = queue.pop_front() {
        if depth >= max_depth {
            continue;
        }
        for action in state.available_actions(world) {
            if !is_relevant(&action, task, &keep) {
                continue;
            }
            let mut next = state.clone();
            if next.apply(world, &action).is_none() || parents.contains_key(&next) {
                continue;
            }
            parents.insert(next.clone(), Some((state.clone(), action)));
            if check_goal(&next, task) {
                let mut plan = Vec::new();
                let mut cur = next;
                while let Some(Some((prev, a))) = parents.get(&cur) {
                    plan.push(a.clone());
                    cur = prev.clone();
                }
                plan.reverse();
                return Some(plan);
            }
            queue.push_back((next, depth + 1));
        }
    }
    None
}

/// Every state reachable from `start` through any action sequence, with no
/// pruning. Only practical for tiny worlds.
pub fn reachable_states(world: &WorldSpec, start: &HouseState) -> Vec<HouseState> {
    let mut seen = std::collections::HashSet::new();
    let mut order = vec![start.clone()];
    seen.insert(start.clone());
    let mut i = 0;
    while i < order.len() {
        let state = order[i].clone();
        i += 1;
        for action in state.available_actions(world) {
            let mut next = state.clone();
            if next.apply(world, &action).is_some() && seen.insert(next.clone()) {
                order.push(next);
            }
        }
    }
    order
}
