//! Lists the configuration classes with a nonzero coefficient, evaluated at
//! a few color counts.

use monocount_core::fourthmoment::discover_classes;

fn main() {
    let classes = discover_classes();
    println!("{} classes", classes.len());
    for c in &classes {
        let at: Vec<String> = [2, 3, 5]
            .iter()
            .map(|&k| c.coefficient.eval(k).to_string())
            .collect();
        println!(
            "{:<14} {:<20} v={} {}  [c=2,3,5: {}]",
            c.signature.to_string(),
            c.label.unwrap_or("-"),
            c.vertices,
            c.coefficient,
            at.join(", ")
        );
    }
}
