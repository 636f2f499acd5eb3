use antcircle::*;
use antcircle::synth::random_circles_scene;

fn main() {
    for seed in [15u64, 48, 61, 94] {
        let (map, truth) = random_circles_scene(256, 256, 2000 + seed, (1, 4), (15, 60), (0, 0));
        let cfg = DetectConfig::with_seed(seed);
        let det = detect_map(&map, &cfg);
        println!("== seed {seed}: truth:");
        for c in &truth.circles { println!("   cx={} cy={} r={}", c.cx, c.cy, c.r); }
        println!("   hits:");
        for h in &det.hits { println!("   cx={:.2} cy={:.2} r={:.2} dev={:.3}", h.cx, h.cy, h.r, h.max_deviation); }
        println!("   nodes={} branches={} loops={} cycles={}",
            det.graph.node_count(), det.graph.branch_count(), det.graph.standalone_loops.len(), det.cycles_enumerated);
    }
}
