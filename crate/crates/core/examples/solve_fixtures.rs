//! Traces the logit path on both Romeo-and-Juliet games and prints the
//! limiting logit equilibrium with its Nash check.

use storygame::narrative::{romeo_juliet_game1, romeo_juliet_game2};
use storygame::qre::{trace_lle, LambdaSchedule, TraceOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for g in [romeo_juliet_game1(), romeo_juliet_game2()] {
        let report = trace_lle(&g, &LambdaSchedule::default(), &TraceOptions::default())?;
        println!("{}", g.title());
        println!("  stopped at lambda {:.4} after {} rungs", report.final_lambda(), report.trace.len());
        for iset in g.infosets() {
            let probs = report.profile.get(iset.id);
            let shown: Vec<String> = iset.actions.iter().zip(probs).map(|(a, p)| format!("{a}={p:.4}")).collect();
            println!("  {}: {}", iset.name, shown.join(" "));
        }
        println!("  max regret {:.2e}, verified {}", report.verification.max_regret(), report.is_verified());
        for w in &report.warnings {
            println!("  note: {w}");
        }
    }
    Ok(())
}
