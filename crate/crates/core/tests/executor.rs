use tvr_core::{
    changelog_fold, eval_stream, eval_table, parse_sql, validate, BoundQuery, Catalog, ChangelogRow, EvalContext, Row,
    Timestamp, Value,
};

const DDL: &str = "CREATE STREAM Bid (bidtime TIMESTAMP EVENTTIME, price INT FORMAT '$', item STRING);";
const LOG: &str = include_str!("data/bid.log");
const HIGHEST_BID: &str = "\
SELECT MaxBid.wstart, MaxBid.wend, Bid.bidtime, Bid.price, Bid.item
FROM Bid,
  (SELECT MAX(TumbleBid.price) maxPrice, TumbleBid.wstart wstart, TumbleBid.wend wend
   FROM Tumble(data => TABLE(Bid), timecol => DESCRIPTOR(bidtime), dur => INTERVAL '10' MINUTE) TumbleBid
   GROUP BY TumbleBid.wend) MaxBid
WHERE Bid.price = MaxBid.maxPrice
  AND Bid.bidtime >= MaxBid.wend - INTERVAL '10' MINUTE
  AND Bid.bidtime < MaxBid.wend";

fn catalog(log: &str) -> Catalog {
    let mut c = Catalog::from_ddl(DDL).unwrap();
    c.attach_log("Bid", log).unwrap();
    c
}

fn bind(sql: &str, c: &Catalog) -> BoundQuery {
    validate(&parse_sql(sql).unwrap(), c).unwrap()
}

fn ts(s: &str) -> Timestamp {
    s.parse().unwrap()
}

fn full_stream(q: &BoundQuery, c: &Catalog) -> Vec<ChangelogRow> {
    let ctx = EvalContext::at_horizon(c);
    eval_stream(q, &ctx, Timestamp::BOTTOM, ctx.cursor).unwrap()
}

fn summary(rows: &[ChangelogRow]) -> Vec<(String, bool, String, u64)> {
    rows.iter()
        .map(|r| {
            let item = match r.row.0.last() {
                Some(Value::Text(s)) => s.clone(),
                other => format!("{other:?}"),
            };
            (item, r.undo, r.ptime.to_string(), r.ver)
        })
        .collect()
}

fn s(item: &str, undo: bool, p: &str, ver: u64) -> (String, bool, String, u64) {
    (item.to_string(), undo, p.to_string(), ver)
}

#[test]
fn combined_delay_and_watermark() {
    let c = catalog(LOG);
    let q = bind(&format!("{HIGHEST_BID} EMIT STREAM AFTER DELAY INTERVAL '6' MINUTES AND AFTER WATERMARK"), &c);
    // 8:00-8:10: delayed partial C at 8:14, completed by the 8:16 watermark.
    // 8:10-8:20: delayed F at 8:18; the 8:21 watermark finds nothing new.
    assert_eq!(
        summary(&full_stream(&q, &c)),
        vec![s("C", false, "8:14", 0), s("C", true, "8:16", 1), s("D", false, "8:16", 2), s("F", false, "8:18", 0)]
    );
}

#[test]
fn equal_maxima_produce_one_row_each() {
    let log = format!("{LOG}8:22 INSERT (8:12, $6, G)\n");
    let c = catalog(&log);
    let rows = eval_table(&bind(HIGHEST_BID, &c), &EvalContext::at_horizon(&c)).unwrap().sorted_rows();
    let items: Vec<&Value> = rows.iter().map(|r| &r.0[4]).collect();
    assert_eq!(items, vec![&Value::Text("D".into()), &Value::Text("G".into()), &Value::Text("F".into())]);
}

#[test]
fn passthrough_stream_is_append_only_with_version_zero() {
    let c = catalog(LOG);
    let q = bind("SELECT bidtime, item FROM Bid EMIT STREAM", &c);
    let rows = full_stream(&q, &c);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| !r.undo && r.ver == 0));
    let items: String = rows.iter().map(|r| r.row.0[1].render(Default::default())).collect();
    assert_eq!(items, "ABCDEF");
}

#[test]
fn input_deletes_become_retractions() {
    let log = "8:00 INSERT (7:55, $1, A)\n8:01 INSERT (7:56, $2, B)\n8:02 DELETE (7:55, $1, A)\n";
    let c = catalog(log);
    let q = bind("SELECT * FROM Bid EMIT STREAM", &c);
    let rows = full_stream(&q, &c);
    assert_eq!(summary(&rows), vec![s("A", false, "8:00", 0), s("B", false, "8:01", 0), s("A", true, "8:02", 1)]);
    let folded = changelog_fold(&rows, &q.output_schema(), ts("8:02")).unwrap();
    let table = eval_table(&q, &EvalContext::new(&c, ts("8:02"))).unwrap();
    assert_eq!(folded, table);
    let sums = bind("SELECT wend, SUM(price) FROM Tumble(TABLE(Bid), DESCRIPTOR(bidtime), INTERVAL '10' MINUTES) GROUP BY wend EMIT STREAM", &c);
    let prices: Vec<(bool, Value)> = full_stream(&sums, &c).into_iter().map(|r| (r.undo, r.row.0[1].clone())).collect();
    assert_eq!(
        prices,
        vec![
            (false, Value::Integer(1)),
            (true, Value::Integer(1)),
            (false, Value::Integer(3)),
            (true, Value::Integer(3)),
            (false, Value::Integer(2)),
        ]
    );
}

#[test]
fn gated_tables_only_grow() {
    let c = catalog(LOG);
    let q = bind(&format!("{HIGHEST_BID} EMIT AFTER WATERMARK"), &c);
    let times: Vec<Timestamp> = (0..=16).map(|m| Timestamp::hm(8, 5 + m)).collect();
    let tables: Vec<_> = times.iter().map(|&t| eval_table(&q, &EvalContext::new(&c, t)).unwrap()).collect();
    for w in tables.windows(2) {
        assert!(w[0].is_sub_bag_of(&w[1]));
    }
}

#[test]
fn tail_ranges_slice_the_full_changelog() {
    let c = catalog(LOG);
    let q = bind(&format!("{HIGHEST_BID} EMIT STREAM"), &c);
    let all = full_stream(&q, &c);
    let ctx = EvalContext::at_horizon(&c);
    for (from, to) in [("8:00", "8:12"), ("8:13", "8:13"), ("8:14", "8:30"), ("8:13", "8:15")] {
        let (from, to) = (ts(from), ts(to));
        let want: Vec<ChangelogRow> = all.iter().filter(|r| r.ptime >= from && r.ptime <= to).cloned().collect();
        assert_eq!(eval_stream(&q, &ctx, from, to).unwrap(), want);
    }
}

#[test]
fn timers_past_the_range_do_not_fire() {
    let c = catalog(LOG);
    let q = bind(&format!("{HIGHEST_BID} EMIT STREAM AFTER DELAY INTERVAL '6' MINUTES"), &c);
    let ctx = EvalContext::at_horizon(&c);
    let upto = eval_stream(&q, &ctx, Timestamp::BOTTOM, ts("8:20")).unwrap();
    assert_eq!(summary(&upto), vec![s("C", false, "8:14", 0), s("F", false, "8:18", 0)]);
    let table = eval_table(&q, &EvalContext::new(&c, ts("8:20"))).unwrap().sorted_rows();
    let items: Vec<Row> = upto.iter().map(|r| r.row.clone()).collect();
    assert_eq!(table, items);
}

#[test]
fn evaluation_is_deterministic() {
    let c = catalog(LOG);
    for emit in ["EMIT STREAM", "EMIT STREAM AFTER WATERMARK", "EMIT STREAM AFTER DELAY INTERVAL '3' MINUTES"] {
        let q = bind(&format!("{HIGHEST_BID} {emit}"), &c);
        assert_eq!(full_stream(&q, &c), full_stream(&bind(&format!("{HIGHEST_BID} {emit}"), &c), &c));
    }
}
