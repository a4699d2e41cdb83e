//! Recovering cube corner labels from the 28 pairwise flags.

use gifs::extractor::{solve_assignment, AssignmentProblem};

fn main() {
    // Corners 1, 3, 5 and 7 lie across the surface from the rest.
    let truth = 0b1010_1010u8;
    let mut prob = AssignmentProblem::from_labels(truth);
    let (labels, cost) = solve_assignment(&prob);
    println!("clean flags: labels {labels:08b} (truth {truth:08b}), cost {cost}");

    // Soften three flags as a learned field might.
    prob.flags[0] = 0.6;
    prob.flags[5] = 0.3;
    prob.flags[17] = 0.55;
    let (labels, cost) = solve_assignment(&prob);
    println!("noisy flags: labels {labels:08b}, cost {cost:.2}");

    let mut spurious = AssignmentProblem::new([0.0; 28]);
    spurious.flags[0] = 1.0;
    let (labels, cost) = solve_assignment(&spurious);
    println!("one spurious flag: labels {labels:08b}, cost {cost}");
}
