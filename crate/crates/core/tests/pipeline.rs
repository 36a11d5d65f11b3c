use samtrace_core::{
    compare, diagnostics, fit_sam, forecast, generate, parse_trace, simulate, summarize, DifferencingMode, FitOptions,
    Flow, FrameKind, GenerationConfig, SamParams, SchedulerKind, SimConfig, TraceFormat,
};

const GOP: [(char, u64); 12] = [
    ('I', 18000),
    ('B', 2500),
    ('B', 2600),
    ('P', 7000),
    ('B', 2400),
    ('B', 2500),
    ('P', 6800),
    ('B', 2600),
    ('B', 2500),
    ('P', 7200),
    ('B', 2400),
    ('B', 2500),
];

fn gop_csv(frames: usize) -> String {
    let mut text = String::from("index,frame_type,size_bytes\r\n");
    for i in 0..frames {
        let (kind, base) = GOP[i % 12];
        // Deterministic jitter so the series is not exactly periodic.
        let jitter = (i as u64 * 7919) % 401;
        text.push_str(&format!("{i},{kind},{}\r\n", base + jitter));
    }
    text
}

#[test]
fn parse_fit_generate_compare() {
    let trace = parse_trace(&gop_csv(2400), TraceFormat::Csv).unwrap();
    assert_eq!(trace.len(), 2400);
    let stats = summarize(&trace).unwrap();
    let i_mean = stats.per_kind.iter().find(|(k, _)| *k == FrameKind::I).unwrap().1.mean;
    let b_mean = stats.per_kind.iter().find(|(k, _)| *k == FrameKind::B).unwrap().1.mean;
    assert!(i_mean > 5.0 * b_mean);

    let mode = DifferencingMode::StandardSeasonal;
    let model = fit_sam(&trace, 12, mode, &FitOptions::standard()).unwrap();
    model.params.validate().unwrap();
    assert_eq!(model.n_effective, 2400 - 26);
    let d = diagnostics(&model, &trace).unwrap();
    assert_eq!(d.ljung_box_lag, 24);

    let mut cfg = GenerationConfig::new(2400, 3);
    cfg.initial_history = Some(model.anchor.clone());
    let synthetic = generate(&model.params, mode, &cfg).unwrap();
    let report = compare(&trace, &synthetic, 12).unwrap();
    assert!(report.acf_distance < 0.1, "{}", report.acf_distance);
    assert!(report.mean.relative.abs() < 0.05, "{:?}", report.mean);

    let fc = forecast(&model, &trace, 12).unwrap();
    // The next frame opens a new GoP, so the forecast peaks there.
    let peak = fc
        .point_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    assert_eq!(peak, 0);
}

#[test]
fn generated_flows_through_every_scheduler() {
    let p = SamParams::new(0.3, 0.1, 0.2, 0.4, 12, 150.0).unwrap();
    let flows: Vec<Flow> = (0..3u32)
        .map(|id| {
            let mut cfg = GenerationConfig::new(700, u64::from(id));
            cfg.init_level = 4000.0 * f64::from(id + 1);
            Flow {
                id,
                trace: generate(&p, DifferencingMode::Eq3Literal, &cfg).unwrap(),
                deadline_offset: 20 * u64::from(id + 1),
                quantum: 1000,
            }
        })
        .collect();
    for kind in SchedulerKind::ALL {
        let r = simulate(flows.clone(), SimConfig::new(1500, 5000, kind)).unwrap();
        let served: u64 = r.flows.iter().map(|f| f.served_bytes).sum();
        let queued: u64 = r.flows.iter().map(|f| f.queued_bytes).sum();
        let offered: u64 = r.flows.iter().map(|f| f.offered_bytes).sum();
        assert_eq!(served + queued, offered, "{kind}");
        // 5000 intervals of 5 ms hold 625 frames per flow.
        assert!(r.flows.iter().all(|f| f.frames_offered == 625));
        assert!(r.jain_fairness > 1.0 / 3.0 - 1e-12 && r.jain_fairness <= 1.0 + 1e-12);
    }
}
