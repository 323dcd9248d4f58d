import argparse
import os
import pandas as pd
from celery_app.tasks import classify_distance_set
from urysohn_sets.config import BATCH_INPUT_FILE, DEFAULT_WORKERS, RESULTS_DIR
from urysohn_sets.io_utils import save_json
from urysohn_sets.pipeline import classify_many


def load_setexprs(csv_path=BATCH_INPUT_FILE):
    """Load the set expressions from CSV"""
    try:
        print(f"Loading set expressions from: {csv_path}")
        if not os.path.exists(csv_path):
            print(f"Error: CSV file not found at {csv_path}")
            return None

        df = pd.read_csv(csv_path, dtype=str, keep_default_na=False)
        if df.empty or 'setexpr' not in df.columns:
            print("Error: CSV file is empty or lacks a setexpr column")
            return None

        print(f"Successfully loaded {len(df)} set expressions")
        return df
    except Exception as e:
        print(f"Error loading set expressions: {str(e)}")
        return None


def _queue(setexprs):
    # Queue tasks and collect task objects
    tasks = []
    for index, setexpr in enumerate(setexprs):
        print(f"Queueing {index + 1}/{len(setexprs)}: {setexpr}")
        tasks.append((setexpr, classify_distance_set.delay(setexpr)))

    outcomes = []
    for setexpr, task in tasks:
        print(f"Waiting for results for: {setexpr}")
        outcomes.append(task.get())
    return outcomes


def main(argv=None):
    parser = argparse.ArgumentParser(description="Classify every set expression of a CSV file")
    parser.add_argument('--input', default=BATCH_INPUT_FILE)
    parser.add_argument('--output', default=RESULTS_DIR / 'classifications.json')
    parser.add_argument('--local', action='store_true', help="Classify in this process instead of queueing Celery tasks")
    parser.add_argument('--workers', type=int, default=DEFAULT_WORKERS)
    args = parser.parse_args(argv)

    print("Starting distance set classification...")

    setexprs_df = load_setexprs(args.input)
    if setexprs_df is None or setexprs_df.empty:
        print("No set expressions found. Exiting...")
        return []

    setexprs = list(setexprs_df['setexpr'])
    if args.local:
        print(f"Classifying {len(setexprs)} set expressions locally with {args.workers} worker(s)...")
        outcomes = classify_many(setexprs, workers=args.workers)
    else:
        outcomes = _queue(setexprs)

    results = []
    for setexpr, result in zip(setexprs, outcomes):
        if result['status'] == 'success':
            results.append(result['result'])
            print(f"✓ {setexpr} - {result['result']['verdict']} (4-values {result['result']['fourvalues']})")
        else:
            print(f"✗ Failed {setexpr} - Error: {result.get('error', 'Unknown error')}")

    if results:
        print(f"Saving results to {args.output}...")
        save_json(results, args.output)

        verdicts = pd.Series([r['verdict'] for r in results]).value_counts()
        print("\nClassification Summary:")
        for verdict, count in verdicts.items():
            print(f"{verdict}: {count}")
    else:
        print("\nNo set expressions were classified successfully.")
    return results


if __name__ == "__main__":
    main()
