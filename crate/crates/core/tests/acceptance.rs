//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; any failure exits non-zero.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use mvblur::blur::{
    generate_setting, plan_viewpoint, render_blurred_frame, sample_blur_weight,
    sample_trajectory_direction, BlurConfig, LatentSampling, Trajectory,
};
use mvblur::camera::{look_at_pose, CameraIntrinsics, CameraPose, SphericalCoord};
use mvblur::dataset::{
    export_transforms, import_transforms, read_dataset, read_depth_raw, write_dataset,
    AxisConvention, DatasetManifest, FrameRecord,
};
use mvblur::geometry::{relative_pose, reprojection_errors, warp_pixel, warp_view, ViewRecord};
use mvblur::image::{DepthMap, Image};
use mvblur::linalg::{mat4_max_abs_diff, mat4_mul, mat4_identity, Mat3, Vec3};
use mvblur::losses::{anneal_weight, depth_loss, photometric_loss, smooth_l1, AnnealSchedule};
use mvblur::metrics::{depth_stability, psnr};
use mvblur::noise::{add_shot_read_noise, degrade, NoiseConfig};
use mvblur::render::{trace_image, volume_render_ray, ConstantField, Ray, TraceOptions};
use mvblur::scene::procedural::{random_scene, textured_plane_scene};
use mvblur::scene::stats::{compute_scene_stats, SceneStats};
use mvblur::scene::viewpoint::{angle_difference, Quadrant, ViewpointSampler};
use mvblur::seed::rng_from_seed;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn volume_rendering_oracle() -> Outcome {
    let field = ConstantField {
        sigma: 1.0,
        color: [1.0; 3],
        far: 1.0,
    };
    let ray = Ray::new(Vec3::zero(), Vec3::new(0.0, 0.0, 1.0));
    let s = volume_render_ray(&field, &ray, 100_000).map_err(|e| e.to_string())?;
    let e = (-1.0f64).exp();
    let color_err = s.color.iter().map(|c| (c - (1.0 - e)).abs()).fold(0.0, f64::max);
    let depth_err = (s.depth - (1.0 - 2.0 * e)).abs();
    check(color_err < 1e-4, format!("color error {color_err:e}"))?;
    check(depth_err < 1e-4, format!("depth error {depth_err:e}"))?;
    Ok(format!("color err {color_err:.1e}, depth err {depth_err:.1e}"))
}

fn warping_exactness() -> Outcome {
    let intr = CameraIntrinsics::new(300.0, 280.0, 128.0, 120.0, 256, 240).unwrap();
    let mut rng = rng_from_seed(2);
    let (mut id_err, mut disp_err, mut rt_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let pos = Vec3::new(
            rng.random_range(-4.0..4.0),
            rng.random_range(-4.0..4.0),
            rng.random_range(1.0..4.0),
        );
        let pose_i = look_at_pose(pos, Vec3::zero(), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let p: (f64, f64) = (rng.random_range(0.0..256.0), rng.random_range(0.0..240.0));
        let d = rng.random_range(0.5..20.0);

        let (q, _) = warp_pixel(p, d, &intr, &intr, &relative_pose(&pose_i, &pose_i)).unwrap();
        id_err = id_err.max((q.0 - p.0).abs().max((q.1 - p.1).abs()));

        let tx = rng.random_range(-1.0..1.0);
        let shifted = CameraPose {
            rotation: Mat3::identity(),
            translation: Vec3::new(tx, 0.0, 0.0),
        };
        let rel = relative_pose(&CameraPose::identity(), &shifted);
        let (q, _) = warp_pixel(p, d, &intr, &intr, &rel).unwrap();
        disp_err = disp_err.max((q.0 - p.0 - intr.fx * tx / d).abs().max((q.1 - p.1).abs()));

        let off = Vec3::new(
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        );
        let pose_k = look_at_pose(pos + off, Vec3::zero(), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let (q, z) = warp_pixel(p, d, &intr, &intr, &relative_pose(&pose_i, &pose_k)).unwrap();
        let (back, _) = warp_pixel(q, z, &intr, &intr, &relative_pose(&pose_k, &pose_i)).unwrap();
        rt_err = rt_err.max(((back.0 - p.0).powi(2) + (back.1 - p.1).powi(2)).sqrt());
    }
    check(id_err <= 1e-9, format!("identity warp error {id_err:e} px"))?;
    check(disp_err <= 1e-9, format!("disparity error {disp_err:e} px"))?;
    check(rt_err <= 1e-6, format!("round-trip error {rt_err:e} px"))?;
    Ok(format!(
        "identity {id_err:.1e} px, disparity {disp_err:.1e} px, round trip {rt_err:.1e} px"
    ))
}

fn cross_view_consistency() -> Outcome {
    let scene = textured_plane_scene::<f64>(11);
    let intr = CameraIntrinsics::from_fov(256, 256, 50.0).unwrap();
    let up = Vec3::new(0.0, 0.0, 1.0);
    let pose_i = look_at_pose(Vec3::new(-0.4, -5.0, 1.0), Vec3::zero(), up).unwrap();
    let pose_k = look_at_pose(Vec3::new(0.6, -4.6, 1.5), Vec3::new(0.1, 0.0, 0.0), up).unwrap();
    let opts = TraceOptions::default();
    let (img_i, depth_i) = trace_image(&scene, &intr, &pose_i, &opts);
    let (img_k, depth_k) = trace_image(&scene, &intr, &pose_k, &opts);

    let errs: Vec<f64> = reprojection_errors(&depth_i, &intr, &pose_i, &depth_k, &intr, &pose_k)
        .into_iter()
        .flatten()
        .collect();
    check(errs.len() > 10_000, format!("only {} mutually visible pixels", errs.len()))?;
    let frac = errs.iter().filter(|&&e| e < 0.5).count() as f64 / errs.len() as f64;

    let view_k = ViewRecord::new(img_k, Some(depth_k), intr, pose_k, 1).unwrap();
    let warped = warp_view(&view_k, &depth_i, &intr, &pose_i).map_err(|e| e.to_string())?;
    let (mut sum, mut n) = (0.0, 0usize);
    for (p, &ok) in warped.valid.iter().enumerate() {
        if ok {
            for c in 0..3 {
                sum += (warped.image.data()[p * 3 + c] - img_i.data()[p * 3 + c]).abs();
                n += 1;
            }
        }
    }
    check(n > 0, "no valid warped pixels")?;
    let mae = sum / n as f64;
    check(frac >= 0.99, format!("{:.2}% within 0.5 px", 100.0 * frac))?;
    check(mae < 1e-2, format!("warped MAE {mae:e}"))?;
    Ok(format!(
        "{} visible px, {:.3}% within 0.5 px, warped MAE {mae:.2e}",
        errs.len(),
        100.0 * frac
    ))
}

fn algorithm_conformance() -> Outcome {
    let scene = random_scene::<f64>(4, "conformance");
    let intr = CameraIntrinsics::from_fov(64, 64, 50.0).unwrap();
    let sampler = ViewpointSampler::default();
    let opts = TraceOptions::default();

    let vp = plan_viewpoint(&scene, &intr, &sampler, 0, 9).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(1);
    let traj = Trajectory {
        start: vp.coord,
        direction: sample_trajectory_direction(&mut rng, 2.5),
        weight: 0.0,
    };
    let blurred = render_blurred_frame(&scene, &intr, &traj, 34, LatentSampling::Uniform, &mut rng, &opts)
        .map_err(|e| e.to_string())?;
    let pose = mvblur::blur::orbit_pose(&vp.coord).map_err(|e| e.to_string())?;
    let (sharp, sharp_depth) = trace_image(&scene, &intr, &pose, &opts);
    check(blurred.image == sharp, "level-0 frame differs from the sharp render")?;
    check(blurred.depth == sharp_depth, "level-0 depth differs from the sharp render")?;

    let mut rng = rng_from_seed(3);
    let mut violations = 0usize;
    for i in 0..10_000 {
        let q = Quadrant::from_index(i);
        let c: SphericalCoord<f64> = sampler.sample(&mut rng, 1.7, Some(q));
        if !(52.5..=67.5).contains(&c.phi) || angle_difference(c.theta, q.degrees()).abs() > 7.5 {
            violations += 1;
        }
        let d: Vec3<f64> = sample_trajectory_direction(&mut rng, 2.5);
        if (0..3).any(|k| !(1.25..=2.5).contains(&d[k].abs())) {
            violations += 1;
        }
        let stats = SceneStats::from_measurements(1.0 + (i % 7) as f64, 9.0, Vec3::new(1.0, 2.0, 0.5)).unwrap();
        let level = 1 + (i % 4) as u32;
        let w = sample_blur_weight(&stats, level, &mut rng);
        let base = stats.blur_weight_base * level as f64;
        if !(0.9 * base..=1.1 * base).contains(&w) {
            violations += 1;
        }
    }
    check(violations == 0, format!("{violations} parameter violations"))?;
    Ok("level 0 bit-exact; 0 violations over 10^4 draws".into())
}

fn blur_monotonicity() -> Outcome {
    let intr = CameraIntrinsics::from_fov(256, 256, 50.0).unwrap();
    let sampler = ViewpointSampler::default();
    let cfg = BlurConfig {
        levels: vec![0, 1, 2, 3, 4],
        latent_samples: 12,
        frames_per_level: 4,
        ..BlurConfig::default()
    };
    let opts = TraceOptions::default();
    let mut per_level: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    let mut viewpoints = 0;
    for (seed, id) in [(21u64, "mono-a"), (22, "mono-b")] {
        let scene = random_scene::<f64>(seed, id);
        for index in 0..6 {
            let vp = plan_viewpoint(&scene, &intr, &sampler, index, seed).map_err(|e| e.to_string())?;
            let frames = generate_setting(&scene, &intr, &vp, &cfg, seed, &opts).map_err(|e| e.to_string())?;
            let reference = &frames.iter().find(|(m, _)| m.level == 0).expect("level 0 rendered").1.image;
            for (meta, frame) in frames.iter().filter(|(m, _)| m.level > 0) {
                let p = psnr(&frame.image, reference, 1.0).map_err(|e| e.to_string())?;
                per_level.entry(meta.level).or_default().push(p);
            }
            viewpoints += 1;
        }
    }
    let means: Vec<f64> = per_level
        .values()
        .map(|v| v.iter().sum::<f64>() / v.len() as f64)
        .collect();
    let summary = means.iter().map(|m| format!("{m:.2}")).collect::<Vec<_>>().join(" > ");
    check(
        means.windows(2).all(|w| w[0] > w[1]),
        format!("mean PSNR by level not strictly decreasing: {summary}"),
    )?;
    Ok(format!("{viewpoints} viewpoints, 2 scenes, mean PSNR dB {summary}"))
}

fn scene_stats_formula() -> Outcome {
    let s = SceneStats::from_measurements(2.0, 6.0, Vec3::new(2.0, 2.0, 1.0)).unwrap();
    let err = (s.blur_weight_base - 12f64.cbrt()).abs();
    check(err <= 1e-12, format!("w_u error {err:e}"))?;

    let scene = random_scene::<f64>(8, "scale");
    let intr = CameraIntrinsics::from_fov(96, 96, 50.0).unwrap();
    let up = Vec3::new(0.0, 0.0, 1.0);
    let pos = Vec3::new(2.5, -3.0, 2.2);
    let base = compute_scene_stats(&scene, &intr, &look_at_pose(pos, Vec3::zero(), up).unwrap())
        .map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for k in [0.25, 3.0, 17.5] {
        let pose = look_at_pose(pos * k, Vec3::zero(), up).unwrap();
        let st = compute_scene_stats(&scene.scaled(k), &intr, &pose).map_err(|e| e.to_string())?;
        worst = worst.max((st.blur_weight_base - base.blur_weight_base).abs());
    }
    check(worst <= 1e-9, format!("scale invariance error {worst:e}"))?;
    Ok(format!("w_u err {err:.1e}, scaling err {worst:.1e}"))
}

fn loss_suite() -> Outcome {
    check(
        smooth_l1(0.0, 1.0) == 0.0 && smooth_l1(0.5, 1.0) == 0.125 && smooth_l1(2.0, 1.0) == 1.5,
        "smooth-L1 table values",
    )?;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-12);
    let h = 1e-6;
    let mut rng = rng_from_seed(77);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(4..40);
        let pred: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gt: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = photometric_loss(&pred, &gt).unwrap().grad;
        for j in 0..n {
            let (mut up, mut dn) = (pred.clone(), pred.clone());
            up[j] += h;
            dn[j] -= h;
            let fd = (photometric_loss(&up, &gt).unwrap().value - photometric_loss(&dn, &gt).unwrap().value) / (2.0 * h);
            worst = worst.max(rel(g[j], fd));
        }

        let (w, ht) = (rng.random_range(2..7u32), rng.random_range(2..7u32));
        let beta = rng.random_range(0.2..2.0);
        let gt_d = DepthMap::from_fn(w, ht, |_, _| rng.random_bool(0.85).then(|| rng.random_range(1.0..5.0)));
        let pred_d = DepthMap::from_fn(w, ht, |x, y| {
            let base = gt_d.get(x, y).unwrap_or(3.0);
            // stay clear of the |d| = beta kink
            let mut off: f64 = rng.random_range(-2.0..2.0) * beta;
            while (off.abs() - beta).abs() < 1e-3 {
                off = rng.random_range(-2.0..2.0) * beta;
            }
            (rng.random_bool(0.9) && base + off > 0.05).then_some(base + off)
        });
        let Ok(l) = depth_loss(&pred_d, &gt_d, beta) else { continue };
        for j in 0..pred_d.len() {
            let Some(v) = pred_d.get_index(j) else { continue };
            let (mut up, mut dn) = (pred_d.clone(), pred_d.clone());
            up.set_index(j, Some(v + h));
            dn.set_index(j, Some(v - h));
            let fd = (depth_loss(&up, &gt_d, beta).unwrap().value - depth_loss(&dn, &gt_d, beta).unwrap().value) / (2.0 * h);
            if l.grad[j] != 0.0 || fd.abs() > 1e-12 {
                worst = worst.max(rel(l.grad[j], fd));
            }
        }
    }
    check(worst <= 1e-5, format!("gradient relative error {worst:e}"))?;

    let sched = AnnealSchedule {
        alpha: 0.99997,
        floor: 0.01,
    };
    let lambda = 0.37;
    check(anneal_weight(lambda, &sched, 0) == lambda, "anneal(0) != lambda")?;
    let mut crossover = 0u64;
    let mut w = 1.0f64;
    while w >= 0.01 {
        w *= 0.99997;
        crossover += 1;
    }
    let mut prev = f64::INFINITY;
    for n in (0..crossover + 5000).step_by(97) {
        let a = anneal_weight(lambda, &sched, n);
        check(a <= prev, format!("anneal weight increased at step {n}"))?;
        prev = a;
    }
    for n in [crossover, crossover + 1, 2 * crossover, 10_000_000] {
        check(anneal_weight(lambda, &sched, n) == 0.01 * lambda, format!("not clamped at step {n}"))?;
    }
    check(anneal_weight(lambda, &sched, crossover - 2) > 0.01 * lambda, "clamped before the crossover")?;
    Ok(format!("gradient rel err {worst:.1e}, anneal crossover at step {crossover}"))
}

fn noise_model() -> Outcome {
    let x = 0.4;
    let mut details = Vec::new();
    for gain in [4.0, 16.0] {
        let cfg = NoiseConfig {
            clip_max: None,
            ..NoiseConfig::with_gain(gain)
        };
        let img = Image::filled(1000, 334, [x; 3]);
        let mut rng = rng_from_seed(gain as u64);
        let noisy = add_shot_read_noise(&img, &cfg, &mut rng);
        let n = noisy.data().len() as f64;
        let mean = noisy.data().iter().sum::<f64>() / n;
        let var = noisy.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let expected = (gain * 1e-3).powi(2) + gain * 2.5e-4 * x;
        let rel = (var - expected).abs() / expected;
        check(rel < 0.01, format!("gain {gain}: variance off by {:.2}%", 100.0 * rel))?;
        details.push(format!("g={gain} var err {:.2}%", 100.0 * rel));
    }

    let mut rng = rng_from_seed(5);
    let img: Image<f64> = Image::from_fn(64, 48, |_, _| [rng.random(), rng.random(), rng.random()]);
    let (clean, _) = degrade(&img, &NoiseConfig::clean(), 3).map_err(|e| e.to_string())?;
    let id_err = img.data().iter().zip(clean.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(id_err <= 1e-7, format!("zero-noise pipeline error {id_err:e}"))?;

    let gains = [4.0, 8.0, 16.0, 20.0];
    let scene = random_scene::<f64>(30, "noise");
    let intr = CameraIntrinsics::from_fov(64, 64, 50.0).unwrap();
    let sampler = ViewpointSampler::default();
    let mut sums = [0.0; 4];
    let images = 10;
    for i in 0..images {
        let vp = plan_viewpoint(&scene, &intr, &sampler, i, 30).map_err(|e| e.to_string())?;
        let pose = mvblur::blur::orbit_pose(&vp.coord).map_err(|e| e.to_string())?;
        let (img, _) = trace_image(&scene, &intr, &pose, &TraceOptions::default());
        let display = img.map(|v| v.clamp(0.0, 1.0).powf(1.0 / 2.2));
        for (k, &g) in gains.iter().enumerate() {
            let (noisy, _) = degrade(&display, &NoiseConfig::with_gain(g), 100 + i as u64).map_err(|e| e.to_string())?;
            sums[k] += psnr(&noisy, &display, 1.0).map_err(|e| e.to_string())?;
        }
    }
    let means = sums.map(|s| s / images as f64);
    let summary = means.iter().map(|m| format!("{m:.2}")).collect::<Vec<_>>().join(" > ");
    check(
        means.windows(2).all(|w| w[0] > w[1]),
        format!("PSNR over gains not decreasing: {summary}"),
    )?;
    Ok(format!("{}, identity err {id_err:.1e}, PSNR dB {summary}", details.join(", ")))
}

fn depth_stability_metric() -> Outcome {
    let d = DepthMap::from_fn(32, 24, |x, y| Some(1.0 + 0.125 * x as f64 + 0.5 * y as f64));
    let same = depth_stability(&d, &d, 3.3).map_err(|e| e.to_string())?;
    check(same.delta_abs == 0.0 && same.delta_rel == 0.0, "identical maps not (0, 0)")?;
    let shifted = d.map_valid(|v| v + 0.5);
    let r = depth_stability(&d, &shifted, 5.0).map_err(|e| e.to_string())?;
    check(
        r.delta_abs == 0.5 && r.delta_rel == 0.1,
        format!("offset case gave ({}, {})", r.delta_abs, r.delta_rel),
    )?;
    Ok("(0, 0) and (0.5, 0.1) exact".into())
}

fn tree_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism_and_io() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for threads in ["1", "8"] {
        let out = tmp.path().join(format!("t{threads}"));
        let code = mvblur::cli::main_with_args([
            "mvblur", "--seed", "42", "--threads", threads, "--width", "48", "--height", "40",
            "--out", out.to_str().unwrap(), "generate", "--viewpoints", "2", "--n", "2", "--m", "4",
        ]);
        check(code == 0, format!("generate exited with {code}"))?;
        trees.push(tree_bytes(&out));
    }
    check(trees[0].len() > 20, format!("only {} files generated", trees[0].len()))?;
    check(trees[0] == trees[1], "datasets differ between 1 and 8 threads")?;

    let scene = random_scene::<f64>(5, "io");
    let intr = CameraIntrinsics::from_fov(40, 32, 55.0).unwrap();
    let vp = plan_viewpoint(&scene, &intr, &ViewpointSampler::default(), 1, 5).map_err(|e| e.to_string())?;
    let cfg = BlurConfig {
        levels: vec![0, 2],
        latent_samples: 3,
        frames_per_level: 2,
        ..BlurConfig::default()
    };
    let frames = generate_setting(&scene, &intr, &vp, &cfg, 5, &TraceOptions::default()).map_err(|e| e.to_string())?;
    let mut manifest = DatasetManifest::new(5, scene.id.clone());
    manifest.blur = Some(cfg);
    manifest.viewpoints.push(vp);
    let mut images = Vec::new();
    let mut depths = Vec::new();
    for (meta, f) in &frames {
        manifest.frames.push(FrameRecord::from_meta(meta, &f.reference_pose, &intr, true));
        images.push(f.image.clone());
        depths.push(Some(f.depth.clone()));
    }
    let root = tmp.path().join("io");
    write_dataset(&manifest, &images, &depths, &root).map_err(|e| e.to_string())?;
    let ds = read_dataset(&root).map_err(|e| e.to_string())?;
    check(ds.manifest() == &manifest, "manifest changed in the round trip")?;
    for (i, d) in depths.iter().enumerate() {
        let d = d.as_ref().unwrap();
        let (_, _, raw) = read_depth_raw(&root.join(manifest.frames[i].depth_path.as_ref().unwrap())).map_err(|e| e.to_string())?;
        let expected: Vec<u32> = (0..d.len()).map(|j| d.get_index(j).map_or(f32::NAN, |v| v as f32).to_bits()).collect();
        let got: Vec<u32> = raw.iter().map(|v| v.to_bits()).collect();
        check(got == expected, format!("depth bits differ in frame {i}"))?;
        let reread = ds.load_depth(i).map_err(|e| e.to_string())?;
        check(reread.validity() == d.validity(), format!("depth validity differs in frame {i}"))?;
    }

    let t = export_transforms(&manifest, &root, AxisConvention::OpenCv).map_err(|e| e.to_string())?;
    let back = import_transforms(&root.join("transforms.json")).map_err(|e| e.to_string())?;
    check(back == t, "transforms changed on re-import")?;
    let mut worst = 0.0f64;
    for (f, (tf, pose)) in manifest.frames.iter().zip(t.frames.iter().zip(back.world_to_camera().unwrap())) {
        worst = worst.max(mat4_max_abs_diff(&mat4_mul(&tf.transform_matrix, &f.pose), &mat4_identity()));
        worst = worst.max(mat4_max_abs_diff(&pose.to_homogeneous(), &f.pose));
    }
    check(worst <= 1e-9, format!("transform inverse error {worst:e}"))?;
    Ok(format!(
        "{} files identical at 1/8 threads; round trip exact; transforms err {worst:.1e}",
        trees[0].len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("volume-rendering oracle", volume_rendering_oracle),
        ("warping exactness", warping_exactness),
        ("cross-view consistency", cross_view_consistency),
        ("blur generation conformance", algorithm_conformance),
        ("blur monotonicity", blur_monotonicity),
        ("scene-stats formula", scene_stats_formula),
        ("loss suite", loss_suite),
        ("noise model", noise_model),
        ("depth-stability metric", depth_stability_metric),
        ("determinism and I/O", determinism_and_io),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|s| s == &n.to_string() || name.contains(s.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n:2} PASS  {name}: {detail} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:2} FAIL  {name}: {why} ({secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
