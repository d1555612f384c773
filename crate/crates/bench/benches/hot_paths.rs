use std::collections::BTreeMap;
use std::hint::black_box;

use bidbench_core::imgcore::{gaussian_blur, heuristic_sigma, ImageBuffer};
use bidbench_core::metrics::{psnr, rmse_lab, ssim};
use bidbench_core::raindrop::{metaball_coverage, render_raindrops, sample_raindrops, RaindropConfig};
use bidbench_core::scenario::{compose, CaseMask, ComponentAsset, ComponentSpec, MixParams};
use bidbench_core::weather::{HazeIntensity, TransmissionMap};
use bidbench_core::{derive_stream, Mode, Task};
use criterion::{criterion_group, criterion_main, Criterion};

const SIZE: usize = 256;

fn image(seed: u64, ch: usize) -> ImageBuffer {
    let mut rng = derive_stream(seed, 0, 0);
    ImageBuffer::from_fn(SIZE, SIZE, ch, |_, _, _| rng.uniform() as f32)
}

fn raindrops(c: &mut Criterion) {
    let cfg = RaindropConfig::scaled_for(SIZE, SIZE);
    let mut rng = derive_stream(1, 0, 0);
    let drops = sample_raindrops(&mut rng, &cfg, SIZE, SIZE);
    c.bench_function("metaball_coverage_256", |b| {
        b.iter(|| metaball_coverage(black_box(&drops), SIZE, SIZE, &cfg))
    });
    let scene = image(2, 3);
    c.bench_function("render_raindrops_256", |b| {
        b.iter(|| {
            let mut rng = derive_stream(3, 0, 0);
            render_raindrops(black_box(&scene), &mut rng, &cfg, Mode::Test).unwrap()
        })
    });
}

fn metrics(c: &mut Criterion) {
    let a = image(4, 3);
    let b = image(5, 3);
    c.bench_function("psnr_256", |bench| {
        bench.iter(|| psnr(black_box(&a), black_box(&b)).unwrap())
    });
    c.bench_function("ssim_256", |bench| {
        bench.iter(|| ssim(black_box(&a), black_box(&b)).unwrap())
    });
    c.bench_function("rmse_lab_256", |bench| {
        bench.iter(|| rmse_lab(black_box(&a), black_box(&b), None).unwrap())
    });
    c.bench_function("gaussian_blur_17_256", |bench| {
        bench.iter(|| gaussian_blur(black_box(&a), 17, heuristic_sigma(17)).unwrap())
    });
}

fn composition(c: &mut Criterion) {
    let task = Task::Task2a;
    let specs: Vec<ComponentSpec> = task
        .registry()
        .iter()
        .enumerate()
        .map(|(i, (name, kind))| ComponentSpec {
            index: i + 1,
            name: name.to_string(),
            kind: *kind,
            asset_dir: None,
            selection_prob: 0.5,
        })
        .collect();
    let policy = task.default_policy(4).unwrap();
    let background = image(6, 3);
    let mask = |seed| image(seed, 1).map(|v| if v > 0.9 { v } else { 0.0 });
    let assets = BTreeMap::from([
        (1, ComponentAsset::Mask(mask(7))),
        (2, ComponentAsset::Mask(mask(8))),
        (
            3,
            ComponentAsset::Transmission(TransmissionMap {
                t: image(9, 1).map(|v| 0.4 + 0.5 * v),
                intensity: Some(HazeIntensity::Moderate),
            }),
        ),
    ]);
    let params = MixParams::new(Mode::Test, SIZE, SIZE);
    let case = CaseMask::from_indices(&[1, 2, 3, 4]).unwrap();
    c.bench_function("compose_task2a_all_256", |b| {
        b.iter(|| {
            let mut rng = derive_stream(10, 0, 2);
            compose(
                task,
                &specs,
                case,
                Some(&background),
                &assets,
                &policy,
                &params,
                &mut rng,
            )
            .unwrap()
        })
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = raindrops, metrics, composition
}
criterion_main!(benches);
