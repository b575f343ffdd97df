use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use chrono::{Days, NaiveDate};
use echocausal::sentiment::SentimentScore;
use echocausal::series::{aggregate_daily, period_summary, Feature, PeriodConfig, ScoredPost};
use proptest::prelude::*;

fn day0() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 3, 1).unwrap()
}

fn posts() -> impl Strategy<Value = Vec<ScoredPost>> {
    prop::collection::vec((0u64..12, 0usize..3, -1.0f64..1.0, 0u64..50), 1..60).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (d, c, compound, likes))| ScoredPost {
                id: format!("p{i}"),
                date: day0() + Days::new(d),
                city: ["A", "B", "C"][c].to_string(),
                sentiment: SentimentScore {
                    compound,
                    ..SentimentScore::NEUTRAL
                },
                emotions: [0.0; 10],
                like_count: likes,
                reply_count: likes % 7,
                retweet_count: likes / 3,
                text: String::new(),
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn aggregate_is_permutation_invariant(ps in posts(), seed in any::<u64>()) {
        let mut shuffled = ps.clone();
        shuffled.sort_by_key(|p| {
            let mut h = DefaultHasher::new();
            (&p.id, seed).hash(&mut h);
            h.finish()
        });
        let city = ps[0].city.clone();
        for f in Feature::FROM_POSTS {
            let a = aggregate_daily(&ps, &city, &f, None, None).unwrap();
            let b = aggregate_daily(&shuffled, &city, &f, None, None).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn tweet_counts_sum_to_posts(ps in posts()) {
        let city = ps[0].city.clone();
        let s = aggregate_daily(&ps, &city, &Feature::TweetCount, None, None).unwrap();
        let n = ps.iter().filter(|p| p.city == city).count();
        prop_assert_eq!(s.values.iter().sum::<f64>(), n as f64);
        prop_assert!(s.values.iter().all(|v| *v >= 0.0));
        let m = aggregate_daily(&ps, &city, &Feature::CompoundMean, None, None).unwrap();
        prop_assert_eq!(m.len(), s.len());
        for (i, v) in m.values.iter().enumerate() {
            prop_assert!(v.abs() <= 1.0);
            prop_assert_eq!(m.imputed[i], s.values[i] == 0.0);
        }
    }

    #[test]
    fn period_counts_partition_city(ps in posts()) {
        let cfg = PeriodConfig::parse("[*]\nP1 = 2020-03-01 .. 2020-03-03\nP2 = 2020-03-05 .. 2020-03-08\n", "p").unwrap();
        let rep = period_summary(&ps, &cfg);
        for (city, rest) in &rep.remainder {
            let in_periods: usize = rep.summaries.iter().filter(|s| &s.city == city).map(|s| s.n_tweets).sum();
            prop_assert_eq!(in_periods + rest, ps.iter().filter(|p| &p.city == city).count());
        }
        for s in &rep.summaries {
            if let Some(m) = s.mean {
                prop_assert!((-1.0..=1.0).contains(&m));
            }
            prop_assert_eq!(s.sd.is_some(), s.n_tweets >= 2);
            prop_assert!(s.sd.unwrap_or(0.0) >= 0.0);
        }
    }
}

#[test]
fn brute_force_daily_means() {
    let mut ps = Vec::new();
    for (i, (d, c)) in [(0, 0.2), (0, -0.2), (0, 0.6), (2, 0.5), (3, -0.1), (3, 0.3)].iter().enumerate() {
        ps.push(ScoredPost {
            id: i.to_string(),
            date: day0() + Days::new(*d),
            city: "T".into(),
            sentiment: SentimentScore {
                compound: *c,
                ..SentimentScore::NEUTRAL
            },
            emotions: [0.0; 10],
            like_count: 0,
            reply_count: 0,
            retweet_count: 0,
            text: String::new(),
        });
    }
    let s = aggregate_daily(&ps, "T", &Feature::CompoundMean, None, None).unwrap();
    for (i, v) in s.values.iter().enumerate() {
        let day = day0() + Days::new(i as u64);
        let vals: Vec<f64> = ps.iter().filter(|p| p.date == day).map(|p| p.sentiment.compound).collect();
        if vals.is_empty() {
            assert!(s.imputed[i]);
            assert_eq!(*v, s.values[i - 1]);
        } else {
            assert!((v - vals.iter().sum::<f64>() / vals.len() as f64).abs() < 1e-12);
        }
    }
    assert!((s.values[0] - 0.2).abs() < 1e-12);

    let cfg = PeriodConfig::parse("[T]\nP1 = 2020-03-01 .. 2020-03-02\nP2 = 2020-03-03 .. 2020-03-04\n", "p").unwrap();
    let rep = period_summary(&ps, &cfg);
    assert_eq!(rep.summaries[0].n_tweets, 3);
    assert!((rep.summaries[0].mean.unwrap() - 0.2).abs() < 1e-12);
    assert!((rep.summaries[1].mean.unwrap() - 0.7 / 3.0).abs() < 1e-12);
    assert_eq!(rep.remainder["T"], 0);
}
