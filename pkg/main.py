"""
疫情源頭定位工具組 - CLI v1.0
✅ generate：隨機圖產生（--stats 輸出網路統計）
✅ wan-weights：航空網路座位數 -> 邊權重
✅ simulate：單一源頭疫情模擬
✅ kdrs：k-DRS / 近似 DMD
✅ localize：線上佈署與定位（--verify 以暴力檢查驗證）
✅ experiment：批次實驗 CSV
"""

import argparse
import json
import sys
from typing import List, Optional

from config.constants import LOCALIZATION, WAN
from config.settings import get_master_seed
from repository.graph_repository import GraphRepository
from repository.result_repository import ResultRepository
from repository.trace_repository import TraceRepository
from schemas.localization import GainKind, LocalizationConfig
from services.errors import ConfigError, SourceLocError
from services.logger import enable_progress, logger

# ============================================
# 子命令
# ============================================


def cmd_generate(args) -> int:
    from services.graph_service import build_generator_spec, generate, graph_statistics, write_edge_list

    spec = build_generator_spec(
        model=args.model,
        n=args.n,
        seed=args.seed,
        p=args.p,
        m=args.m,
        radius=args.radius,
        degree=args.degree,
    )
    graph = generate(spec)
    if args.out:
        GraphRepository().save(graph, args.out)
    else:
        sys.stdout.write(write_edge_list(graph))
    if args.stats:
        stats = json.dumps(graph_statistics(graph), indent=2)
        print(stats, file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_wan_weights(args) -> int:
    from services.graph_service import parse_seat_lines, preprocess_wan, wan_weight_lines, write_edge_list

    repo = GraphRepository()
    if args.preprocess:
        seats = repo.load_seats(args.input) if args.input else parse_seat_lines(sys.stdin.read())
        output = write_edge_list(preprocess_wan(seats, args.min_seats, args.alpha, args.theta))
    elif args.input:
        output = repo.convert_seats(args.input, args.alpha, args.theta)
    else:
        output = wan_weight_lines(sys.stdin.read(), args.alpha, args.theta)
    if args.out:
        repo.save_text(output, args.out)
    else:
        sys.stdout.write(output)
    return 0


def cmd_simulate(args) -> int:
    from services.epidemic_service import simulate

    graph = GraphRepository().load(args.graph)
    source = graph.index_of(args.source)
    trace = simulate(graph, source, args.eps, args.seed, start_time=args.start_time)
    TraceRepository().save(trace, graph, args.out)
    logger.info(f"✅ 模擬完成: source={args.source} eps={args.eps} -> {args.out}")
    return 0


def cmd_kdrs(args) -> int:
    from services.graph_service import all_pairs_shortest_paths
    from services.resolving_service import approx_dmd, class_count, exact_dmd, greedy_k_drs

    graph = GraphRepository().load(args.graph)
    D = all_pairs_shortest_paths(graph)
    if args.dmd:
        value = exact_dmd(D) if args.exact else approx_dmd(D)
        print(json.dumps({"dmd": value, "exact": bool(args.exact), "n": graph.n}))
        return 0
    if args.k is None:
        raise ConfigError("kdrs needs --k K or --dmd")
    witnesses = greedy_k_drs(D, args.k, max_workers=args.workers)
    print(json.dumps({
        "set": [graph.labels[v] for v in witnesses],
        "classes": class_count(D, witnesses),
        "n": graph.n,
    }))
    return 0


def cmd_localize(args) -> int:
    from services.graph_service import distances_for
    from services.localization_service import Localizer, oracle_candidates
    from utils.formatters import parse_budget, parse_nodes

    graph = GraphRepository().load(args.graph)
    D = distances_for(graph)
    trace = TraceRepository().load(args.trace, graph)
    static = [graph.index_of(label) for label in parse_nodes(args.static)]
    config = LocalizationConfig(
        gain=GainKind(args.gain),
        k_d=parse_budget(args.kd),
        delta=args.delta,
        epsilon=args.eps,
        tolerance_scale=args.c,
        seed=args.seed,
        refresh_negatives=args.refresh_negatives,
    )

    localizer = Localizer(graph, D, static, trace, config, run_id="cli")
    result = localizer.run()
    payload = result.to_summary()
    payload["candidates"] = [graph.labels[v] for v in payload["candidates"]]
    payload["sensors"] = [graph.labels[v] for v in payload["sensors"]]

    if args.verify:
        oracle = oracle_candidates(localizer)
        payload["verified"] = oracle == list(result.final_candidates)
        if not payload["verified"]:
            logger.error(f"❌ 候選集合與暴力檢查不一致: {oracle}")

    if args.out:
        ResultRepository().save_json(payload, args.out)
    print(json.dumps(payload))
    return 0 if payload.get("verified", True) else 1


def cmd_experiment(args) -> int:
    from services.experiment_service import ExperimentService, summarize

    if args.progress:
        enable_progress()
    repo = ResultRepository()
    config = repo.load_config(args.config)
    if args.seed is not None:
        config = config.model_copy(update={"master_seed": args.seed})
    service = ExperimentService(config, max_workers=args.workers)
    rows = service.run()
    repo.save_rows(rows, args.out)
    if args.summary:
        repo.save_summary(summarize(rows), args.summary)
    if args.history:
        repo.save_history(service.history_frame(), args.history)
    return 0


# ============================================
# 參數解析
# ============================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sourceloc",
        description="Online sensor placement and epidemic source localization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random connected graph")
    p.add_argument("--model", required=True, choices=["er", "ba", "rgg", "rt", "plt"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--radius", "--R", dest="radius", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--seed", type=int, default=get_master_seed())
    p.add_argument("--out")
    p.add_argument("--stats", action="store_true", help="print network statistics as JSON")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("wan-weights", help="convert 'u v seats' lines into 'u v w'")
    p.add_argument("--alpha", type=float, default=WAN.ALPHA)
    p.add_argument("--theta", type=float, default=WAN.THETA)
    p.add_argument("--input")
    p.add_argument("--out")
    p.add_argument("--preprocess", action="store_true",
                   help="drop small routes, prune leaves, keep the largest component")
    p.add_argument("--min-seats", type=float, default=WAN.MIN_SEATS)
    p.set_defaults(func=cmd_wan_weights)

    p = sub.add_parser("simulate", help="simulate one epidemic and write its trace")
    p.add_argument("--graph", required=True)
    p.add_argument("--source", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=get_master_seed())
    p.add_argument("--start-time", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("kdrs", help="greedy k-DRS or approximate DMD")
    p.add_argument("--graph", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--k", type=int)
    group.add_argument("--dmd", action="store_true")
    p.add_argument("--exact", action="store_true", help="brute-force DMD (small graphs only)")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_kdrs)

    p = sub.add_parser("localize", help="run online localization on a stored trace")
    p.add_argument("--graph", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--static", required=True, help='comma separated labels, e.g. "0,5,9"')
    p.add_argument("--gain", choices=[g.value for g in GainKind], default=GainKind.SIZE.value)
    p.add_argument("--kd", default="inf")
    p.add_argument("--delta", type=float, default=LOCALIZATION.DELTA)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--c", type=float, default=LOCALIZATION.TOLERANCE_SCALE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--refresh-negatives", action="store_true")
    p.add_argument("--verify", action="store_true", help="check the final set against a brute-force oracle")
    p.add_argument("--out")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("experiment", help="run a batch experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--summary")
    p.add_argument("--history", help="candidate-set size per step, one row per trial and step")
    p.add_argument("--progress", action="store_true", help="one line per trial on stderr")
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int, help="override master_seed")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SourceLocError as e:
        logger.error(f"❌ {e}")
        return 2
    except ValueError as e:
        # pydantic ValidationError 也是 ValueError
        logger.error(f"❌ 參數錯誤: {e}")
        return 2
    except Exception as e:
        logger.error(f"❌ 未預期的錯誤: {e}", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
